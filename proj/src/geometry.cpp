// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "vpf/error.hpp"

namespace vpf {

namespace {

constexpr double kAreaEpsilon = 1e-12;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Vec2 line_intersection(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) noexcept {
  const double d1 = cross(a, b, p);
  const double d2 = cross(a, b, q);
  const double t = d1 / (d1 - d2);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

}  // namespace

BoxParams to_params(const Box3D& b) noexcept {
  return {b.center[0], b.center[1], b.center[2], b.dims[0], b.dims[1], b.dims[2], b.heading};
}

Box3D from_params(const BoxParams& p) noexcept {
  return Box3D{{p[0], p[1], p[2]}, {p[3], p[4], p[5]}, p[6]};
}

double canonical_heading(double theta) noexcept {
  constexpr double two_pi = 2 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t <= -std::numbers::pi) t += two_pi;
  if (t > std::numbers::pi) t -= two_pi;
  return t;
}

void validate_box(const Box3D& b) {
  for (int a = 0; a < 3; ++a) {
    check(std::isfinite(b.center[a]), ErrorCode::DegenerateBox, "box center must be finite");
    check(std::isfinite(b.dims[a]) && b.dims[a] > 0, ErrorCode::DegenerateBox,
          "box dims must be finite and positive");
  }
  check(std::isfinite(b.heading), ErrorCode::DegenerateBox, "box heading must be finite");
}

std::array<Vec2, 4> bev_corners(const Box3D& b) noexcept {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double hl = b.dims[0] / 2;
  const double hw = b.dims[1] / 2;
  const double local[4][2] = {{hl, -hw}, {hl, hw}, {-hl, hw}, {-hl, -hw}};
  std::array<Vec2, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {b.center[0] + local[i][0] * c - local[i][1] * s,
              b.center[1] + local[i][0] * s + local[i][1] * c};
  }
  return out;
}

std::array<std::array<double, 3>, 8> corners3d(const Box3D& b) noexcept {
  const auto bev = bev_corners(b);
  std::array<std::array<double, 3>, 8> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {bev[i].x, bev[i].y, b.center[2] - b.dims[2] / 2};
    out[i + 4] = {bev[i].x, bev[i].y, b.center[2] + b.dims[2] / 2};
  }
  return out;
}

double polygon_area(std::span<const Vec2> poly) noexcept {
  double twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) / 2;
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> out(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    std::vector<Vec2> in;
    in.swap(out);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& cur = in[i];
      const Vec2& prev = in[(i + in.size() - 1) % in.size()];
      const bool cur_in = cross(a, b, cur) >= 0;
      const bool prev_in = cross(a, b, prev) >= 0;
      if (cur_in) {
        if (!prev_in) out.push_back(line_intersection(prev, cur, a, b));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return out;
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  const auto poly = clip_convex(ca, cb);
  if (poly.size() < 3) return 0;
  const double area = polygon_area(poly);
  return area < kAreaEpsilon ? 0 : area;
}

double iou3d(const Box3D& a_in, const Box3D& b_in) {
  validate_box(a_in);
  validate_box(b_in);
  if (a_in == b_in) return 1;
  // Evaluate in a canonical argument order so the result is exactly symmetric.
  const bool swap = to_params(b_in) < to_params(a_in);
  const Box3D& a = swap ? b_in : a_in;
  const Box3D& b = swap ? a_in : b_in;

  const double za0 = a.center[2] - a.dims[2] / 2;
  const double za1 = a.center[2] + a.dims[2] / 2;
  const double zb0 = b.center[2] - b.dims[2] / 2;
  const double zb1 = b.center[2] + b.dims[2] / 2;
  const double dz = std::min(za1, zb1) - std::max(za0, zb0);
  if (dz <= 0) return 0;
  const double area = bev_intersection_area(a, b);
  if (area <= 0) return 0;
  const double inter = area * dz;
  const double vol_a = a.dims[0] * a.dims[1] * a.dims[2];
  const double vol_b = b.dims[0] * b.dims[1] * b.dims[2];
  return std::clamp(inter / (vol_a + vol_b - inter), 0.0, 1.0);
}

double diou_loss(const Box3D& b, const Box3D& gt) {
  const double iou = iou3d(b, gt);
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  lo.fill(INFINITY);
  hi.fill(-INFINITY);
  for (const Box3D* box : {&b, &gt}) {
    for (const auto& c : corners3d(*box)) {
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], c[a]);
        hi[a] = std::max(hi[a], c[a]);
      }
    }
  }
  double c2 = 0;
  double d2 = 0;
  for (int a = 0; a < 3; ++a) {
    const double dc = b.center[a] - gt.center[a];
    c2 += dc * dc;
    d2 += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  }
  return 1 - iou + c2 / d2;
}

std::array<double, 6> diou_loss_gradient_axis_aligned(const Box3D& b, const Box3D& gt) {
  validate_box(b);
  validate_box(gt);
  check(b.heading == 0 && gt.heading == 0, ErrorCode::InvalidArgument,
        "analytic DIoU gradient requires heading 0 on both boxes");

  std::array<double, 3> ov{}, d_ov_c{}, d_ov_s{};
  std::array<double, 3> ext{}, d_ext_c{}, d_ext_s{};
  for (int a = 0; a < 3; ++a) {
    const double hb = b.center[a] + b.dims[a] / 2;
    const double lb = b.center[a] - b.dims[a] / 2;
    const double hg = gt.center[a] + gt.dims[a] / 2;
    const double lg = gt.center[a] - gt.dims[a] / 2;
    const double top_b = hb < hg ? 1 : 0;  // b's face bounds the overlap
    const double bot_b = lb > lg ? 1 : 0;
    ov[a] = std::max(0.0, std::min(hb, hg) - std::max(lb, lg));
    d_ov_c[a] = top_b - bot_b;
    d_ov_s[a] = 0.5 * top_b + 0.5 * bot_b;
    const double etop_b = hb > hg ? 1 : 0;  // b's face bounds the enclosure
    const double ebot_b = lb < lg ? 1 : 0;
    ext[a] = std::max(hb, hg) - std::min(lb, lg);
    d_ext_c[a] = etop_b - ebot_b;
    d_ext_s[a] = 0.5 * etop_b + 0.5 * ebot_b;
  }
  const double inter = ov[0] * ov[1] * ov[2];
  const double vb = b.dims[0] * b.dims[1] * b.dims[2];
  const double vg = gt.dims[0] * gt.dims[1] * gt.dims[2];
  const double uni = vb + vg - inter;
  double c2 = 0;
  double d2 = 0;
  for (int a = 0; a < 3; ++a) {
    c2 += (b.center[a] - gt.center[a]) * (b.center[a] - gt.center[a]);
    d2 += ext[a] * ext[a];
  }

  std::array<double, 6> grad{};
  for (int p = 0; p < 6; ++p) {
    const int a = p % 3;
    const bool is_center = p < 3;
    double d_inter = 0;
    if (inter > 0) {
      const double others = ov[(a + 1) % 3] * ov[(a + 2) % 3];
      d_inter = others * (is_center ? d_ov_c[a] : d_ov_s[a]);
    }
    const double d_vb = is_center ? 0 : b.dims[(a + 1) % 3] * b.dims[(a + 2) % 3];
    const double d_iou = (d_inter * uni - inter * (d_vb - d_inter)) / (uni * uni);
    const double d_c2 = is_center ? 2 * (b.center[a] - gt.center[a]) : 0;
    const double d_d2 = 2 * ext[a] * (is_center ? d_ext_c[a] : d_ext_s[a]);
    grad[p] = -d_iou + (d_c2 * d2 - c2 * d_d2) / (d2 * d2);
  }
  return grad;
}

double finite_difference_check(const std::function<double(const Box3D&)>& f,
                               const std::function<BoxParams(const Box3D&)>& gradient,
                               const Box3D& at, double step, std::span<const int> params) {
  const BoxParams base = to_params(at);
  const BoxParams analytic = gradient(at);
  double worst = 0;
  for (int k : params) {
    check(k >= 0 && k < kBoxParams, ErrorCode::OutOfRange, "box parameter index out of range");
    BoxParams plus = base;
    BoxParams minus = base;
    plus[k] += step;
    minus[k] -= step;
    const double numeric = (f(from_params(plus)) - f(from_params(minus))) / (2 * step);
    worst = std::max(worst, std::abs(analytic[k] - numeric) / std::max(1.0, std::abs(numeric)));
  }
  return worst;
}

bool point_in_box(const Box3D& b, double x, double y, double z) noexcept {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double dx = x - b.center[0];
  const double dy = y - b.center[1];
  const double lx = dx * c + dy * s;
  const double ly = -dx * s + dy * c;
  const double lz = z - b.center[2];
  return std::abs(lx) <= b.dims[0] / 2 && std::abs(ly) <= b.dims[1] / 2 &&
         std::abs(lz) <= b.dims[2] / 2;
}

nlohmann::json box_to_json(const Box3D& b) {
  return nlohmann::json{{"center", b.center}, {"dims", b.dims}, {"heading", b.heading}};
}

Box3D box_from_json(const nlohmann::json& j) {
  check(j.is_object() && j.contains("center") && j.contains("dims") && j.contains("heading"),
        ErrorCode::Format, "box must have center, dims and heading");
  Box3D b;
  try {
    b.center = j.at("center").get<std::array<double, 3>>();
    b.dims = j.at("dims").get<std::array<double, 3>>();
    b.heading = j.at("heading").get<double>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Format, "box fields must be numeric: center[3], dims[3], heading");
  }
  validate_box(b);
  b.heading = canonical_heading(b.heading);
  return b;
}

}  // namespace vpf
