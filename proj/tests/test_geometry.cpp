// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "vpf/generators.hpp"
#include "vpf/geometry.hpp"
#include "vpf/oracle.hpp"

using namespace vpf;

namespace {

Box3D cube(double x, double y, double z) { return {{x, y, z}, {1, 1, 1}, 0}; }

Box3D rotate_about_origin(Box3D b, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double x = b.center[0];
  const double y = b.center[1];
  b.center[0] = c * x - s * y;
  b.center[1] = s * x + c * y;
  b.heading = canonical_heading(b.heading + phi);
  return b;
}

}  // namespace

TEST_CASE("IoU analytic cases") {
  CHECK(iou3d(cube(0, 0, 0), cube(0, 0, 0)) == 1.0);
  CHECK(iou3d(cube(0, 0, 0), cube(100, 0, 0)) == 0.0);
  CHECK(iou3d(cube(0, 0, 0), cube(0.5, 0, 0)) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(iou3d(cube(0, 0, 0), cube(0, 0, 1)) == 0.0);  // touching faces
  const Box3D turned{{0, 0, 0}, {1, 1, 1}, std::numbers::pi / 2};
  CHECK(iou3d(cube(0, 0, 0), turned) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("IoU is exactly symmetric and invariant under rigid motion") {
  gen::Rng rng(51);
  for (int t = 0; t < 300; ++t) {
    const Box3D a = gen::box(rng, 1.5, 0.3, 3, true);
    const Box3D b = gen::box(rng, 1.5, 0.3, 3, true);
    const double iou = iou3d(a, b);
    CHECK(iou == iou3d(b, a));
    CHECK(iou >= 0);
    CHECK(iou <= 1);
    Box3D ta = a;
    Box3D tb = b;
    const double d[3] = {gen::uniform(rng, -5, 5), gen::uniform(rng, -5, 5), gen::uniform(rng, -5, 5)};
    for (int k = 0; k < 3; ++k) {
      ta.center[k] += d[k];
      tb.center[k] += d[k];
    }
    CHECK(std::abs(iou3d(ta, tb) - iou) <= 1e-9);
    const double phi = gen::uniform(rng, -3, 3);
    CHECK(std::abs(iou3d(rotate_about_origin(a, phi), rotate_about_origin(b, phi)) - iou) <= 1e-9);
  }
}

TEST_CASE("IoU of a box with its scaled copy is 1/s^3") {
  gen::Rng rng(52);
  for (int t = 0; t < 50; ++t) {
    const Box3D a = gen::box(rng, 2, 0.5, 3, true);
    const double s = gen::uniform(rng, 1.01, 3);
    Box3D big = a;
    for (auto& d : big.dims) d *= s;
    CHECK(std::abs(iou3d(a, big) - 1 / (s * s * s)) <= 1e-9);
  }
}

TEST_CASE("IoU agrees with Monte Carlo on rotated pairs") {
  gen::Rng rng(53);
  for (int t = 0; t < 5; ++t) {
    const Box3D a = gen::box(rng, 0.5, 0.5, 2, true);
    const Box3D b = gen::box(rng, 0.5, 0.5, 2, true);
    CHECK(std::abs(iou3d(a, b) - oracle::monte_carlo_iou(a, b, 200000, 100 + t)) <= 0.01);
  }
}

TEST_CASE("degenerate boxes are rejected") {
  Box3D flat{{0, 0, 0}, {1, 0, 1}, 0};
  try {
    iou3d(flat, cube(0, 0, 0));
    FAIL("expected DegenerateBox");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateBox);
  }
  CHECK_THROWS_AS(diou_loss(cube(0, 0, 0), {{0, 0, 0}, {1, 1, -2}, 0}), Error);
  CHECK_THROWS_AS(validate_box({{0, 0, 0}, {1, NAN, 1}, 0}), Error);
}

TEST_CASE("heading canonicalisation wraps to (-pi, pi]") {
  const double pi = std::numbers::pi;
  CHECK(canonical_heading(pi) == doctest::Approx(pi));
  CHECK(canonical_heading(-pi) == doctest::Approx(pi));
  CHECK(canonical_heading(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(canonical_heading(0.25) == 0.25);
}

TEST_CASE("polygon clipping of rotated squares") {
  const Box3D a{{0, 0, 0}, {2, 2, 1}, 0};
  const Box3D b{{0, 0, 0}, {2, 2, 1}, std::numbers::pi / 4};
  // Regular octagon from two concentric squares of side 2.
  CHECK(bev_intersection_area(a, b) == doctest::Approx(8 * (std::sqrt(2.0) - 1)).epsilon(1e-12));
  const auto c = bev_corners(a);
  CHECK(polygon_area(c) == doctest::Approx(4.0));
}

TEST_CASE("DIoU loss analytic cases and bounds") {
  CHECK(diou_loss(cube(0, 0, 0), cube(0, 0, 0)) == 0.0);
  CHECK(diou_loss(cube(0, 0, 0), cube(2, 0, 0)) == doctest::Approx(1 + 4.0 / 11).epsilon(1e-12));
  gen::Rng rng(54);
  for (int t = 0; t < 500; ++t) {
    const Box3D a = gen::box(rng, 4, 0.1, 4, true);
    const Box3D b = gen::box(rng, 4, 0.1, 4, true);
    const double l = diou_loss(a, b);
    CHECK(l >= 0);
    CHECK(l < 2);
    CHECK(diou_loss(a, a) == 0.0);
  }
}

TEST_CASE("finite-difference harness") {
  const Box3D at{{0.3, -0.2, 0.1}, {1.2, 0.8, 1.5}, 0};
  const Box3D ref{{0, 0, 0}, {1, 1, 1}, 0};
  const std::array<int, 3> centers{0, 1, 2};
  const auto c2 = [&](const Box3D& b) {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += (b.center[k] - ref.center[k]) * (b.center[k] - ref.center[k]);
    return s;
  };
  const auto c2_grad = [&](const Box3D& b) {
    BoxParams g{};
    for (int k = 0; k < 3; ++k) g[k] = 2 * (b.center[k] - ref.center[k]);
    return g;
  };
  CHECK(finite_difference_check(c2, c2_grad, at, 1e-4, centers) <= 1e-8);
  const auto constant = [](const Box3D&) { return 4.2; };
  const auto zero = [](const Box3D&) { return BoxParams{}; };
  CHECK(finite_difference_check(constant, zero, at, 1e-4, centers) == 0.0);

  const std::array<int, 6> all{0, 1, 2, 3, 4, 5};
  const auto f = [&](const Box3D& b) { return diou_loss(b, ref); };
  const auto g = [&](const Box3D& b) {
    const auto g6 = diou_loss_gradient_axis_aligned(b, ref);
    BoxParams p{};
    std::copy(g6.begin(), g6.end(), p.begin());
    return p;
  };
  CHECK(finite_difference_check(f, g, at, 1e-4, all) <= 1e-4);
  CHECK_THROWS_AS(diou_loss_gradient_axis_aligned({{0, 0, 0}, {1, 1, 1}, 0.1}, ref), Error);
}

TEST_CASE("point-in-box counts faces as inside") {
  const Box3D b{{1, 1, 1}, {2, 2, 2}, 0};
  CHECK(point_in_box(b, 2, 1, 1));
  CHECK(point_in_box(b, 0, 0, 0));
  CHECK_FALSE(point_in_box(b, 2.0001, 1, 1));
}

TEST_CASE("boxes serialise as JSON") {
  const Box3D b{{1, 2, 3}, {4, 5, 6}, 0.5};
  const auto j = box_to_json(b);
  CHECK(j.at("center") == nlohmann::json{1, 2, 3});
  CHECK(box_from_json(j) == b);
  auto extra = j;
  extra["class"] = "Vehicle";
  CHECK(box_from_json(extra) == b);
  CHECK_THROWS_AS(box_from_json(nlohmann::json{{"center", {1, 2}}}), Error);
}
