// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

namespace vpf {

// 7-DoF box: center, (length along heading, width, height), heading about +z.
struct Box3D {
  std::array<double, 3> center{};
  std::array<double, 3> dims{};
  double heading = 0;

  bool operator==(const Box3D&) const = default;
};

inline constexpr int kBoxParams = 7;
using BoxParams = std::array<double, kBoxParams>;  // cx cy cz l w h heading

BoxParams to_params(const Box3D& b) noexcept;
Box3D from_params(const BoxParams& p) noexcept;

// Wraps to (-pi, pi].
double canonical_heading(double theta) noexcept;

// Throws DegenerateBox unless every dim is finite and positive.
void validate_box(const Box3D& b);

struct Vec2 {
  double x = 0;
  double y = 0;
};

// BEV footprint corners in counter-clockwise order.
std::array<Vec2, 4> bev_corners(const Box3D& b) noexcept;

std::array<std::array<double, 3>, 8> corners3d(const Box3D& b) noexcept;

double polygon_area(std::span<const Vec2> poly) noexcept;

// Sutherland-Hodgman: clips `subject` against the convex CCW polygon `clip`.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

double bev_intersection_area(const Box3D& a, const Box3D& b);
double iou3d(const Box3D& a, const Box3D& b);

// 1 - IoU + c^2 / d^2 with d the diagonal of the axis-aligned cuboid
// enclosing all 16 corners.
double diou_loss(const Box3D& b, const Box3D& gt);

// Analytic gradient of diou_loss w.r.t. b's (center, dims) when both boxes
// have heading 0. Throws InvalidArgument otherwise.
std::array<double, 6> diou_loss_gradient_axis_aligned(const Box3D& b, const Box3D& gt);

// Central differences over the selected parameters; returns the max of
// |analytic - numeric| / max(1, |numeric|).
double finite_difference_check(const std::function<double(const Box3D&)>& f,
                               const std::function<BoxParams(const Box3D&)>& gradient,
                               const Box3D& at, double step,
                               std::span<const int> params);

bool point_in_box(const Box3D& b, double x, double y, double z) noexcept;

// {"center":[x,y,z],"dims":[l,w,h],"heading":t}
nlohmann::json box_to_json(const Box3D& b);
Box3D box_from_json(const nlohmann::json& j);

}  // namespace vpf
