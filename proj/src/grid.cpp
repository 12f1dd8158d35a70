// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace vpf {

namespace {

// floor(q), except that a quotient within rounding noise of an integer snaps
// to it: (12.8 - 0) / 0.1 evaluates to 127.99999999999999.
std::int64_t cell_count(double span, double size) {
  const double q = span / size;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) {
    return static_cast<std::int64_t>(r);
  }
  return static_cast<std::int64_t>(std::floor(q));
}

struct KeyedPoint {
  std::int64_t key;
  std::size_t index;
};

// Groups in-range points by packed key. Within a group, points are ordered by
// value so that accumulation order does not depend on input order.
std::vector<KeyedPoint> sorted_keys(const PointCloud& cloud, const GridSpec& spec,
                                    bool drop_height) {
  std::vector<KeyedPoint> keyed;
  keyed.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto v = spec.voxel_of(cloud.points[i]);
    if (!v) continue;
    const std::int64_t key =
        drop_height ? linear_index(Coord2{(*v)[0], (*v)[1]}, spec.pillar_extents())
                    : spec.pack(*v);
    keyed.push_back({key, i});
  }
  check(!keyed.empty(), ErrorCode::EmptyGrid, "no point falls inside the grid range");
  const auto& pts = cloud.points;
  std::sort(keyed.begin(), keyed.end(), [&](const KeyedPoint& a, const KeyedPoint& b) {
    const Point& pa = pts[a.index];
    const Point& pb = pts[b.index];
    return std::tie(a.key, pa.x, pa.y, pa.z, pa.intensity, a.index) <
           std::tie(b.key, pb.x, pb.y, pb.z, pb.intensity, b.index);
  });
  return keyed;
}

}  // namespace

GridSpec GridSpec::create(const Vec3& range_min, const Vec3& range_max,
                          const Vec3& voxel_size) {
  GridSpec g;
  std::int64_t volume = 1;
  for (int a = 0; a < 3; ++a) {
    check(std::isfinite(range_min[a]) && std::isfinite(range_max[a]) &&
              std::isfinite(voxel_size[a]),
          ErrorCode::InvalidArgument, "grid spec values must be finite");
    check(range_max[a] > range_min[a], ErrorCode::InvalidArgument,
          "range_max must exceed range_min on every axis");
    check(voxel_size[a] > 0, ErrorCode::InvalidArgument,
          "voxel_size must be positive on every axis");
    const std::int64_t n = cell_count(range_max[a] - range_min[a], voxel_size[a]);
    check(n >= 1 && n <= std::numeric_limits<std::int32_t>::max(),
          ErrorCode::InvalidArgument, "grid extent out of supported range");
    volume *= n;
    check(volume < (std::int64_t{1} << 62), ErrorCode::InvalidArgument,
          "grid too large to pack into a 64-bit key");
    g.extents_[a] = static_cast<std::int32_t>(n);
  }
  g.range_min_ = range_min;
  g.range_max_ = range_max;
  g.voxel_size_ = voxel_size;
  return g;
}

std::optional<Coord3> GridSpec::voxel_of(const Point& p) const noexcept {
  const double xyz[3] = {p.x, p.y, p.z};
  Coord3 c{};
  for (int a = 0; a < 3; ++a) {
    if (!(xyz[a] >= range_min_[a] && xyz[a] < range_max_[a])) return std::nullopt;
    const double idx = std::floor((xyz[a] - range_min_[a]) / voxel_size_[a]);
    if (idx >= extents_[a]) return std::nullopt;
    c[a] = static_cast<std::int32_t>(idx);
  }
  return c;
}

VoxelAssignment assign_voxel_indices(const PointCloud& cloud, const GridSpec& spec) {
  VoxelAssignment out;
  out.indices.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.indices.push_back(spec.voxel_of(p));
    if (!out.indices.back()) ++out.dropped;
  }
  return out;
}

SparseTensor3D build_voxel_features(const PointCloud& cloud, const GridSpec& spec) {
  const auto keyed = sorted_keys(cloud, spec, /*drop_height=*/false);

  SparseTensor3D out;
  out.stride = 1;
  out.extents = spec.extents();
  std::vector<Real> rows;
  std::size_t begin = 0;
  while (begin < keyed.size()) {
    std::size_t end = begin;
    Real sum[4] = {0, 0, 0, 0};
    while (end < keyed.size() && keyed[end].key == keyed[begin].key) {
      const Point& p = cloud.points[keyed[end].index];
      sum[0] += p.x;
      sum[1] += p.y;
      sum[2] += p.z;
      sum[3] += p.intensity;
      ++end;
    }
    const auto n = static_cast<Real>(end - begin);
    for (Real s : sum) rows.push_back(s / n);
    out.coords.push_back(*spec.voxel_of(cloud.points[keyed[begin].index]));
    begin = end;
  }
  out.features = FeatureMatrix(out.coords.size(), 4);
  out.features.data() = std::move(rows);
  return out;
}

SparseTensor2D build_pillar_features(const PointCloud& cloud, const GridSpec& spec,
                                     const PointEncoderWeights& weights) {
  const std::size_t d = weights.out_channels;
  check(d > 0 && weights.weight.size() == d * 4 && weights.bias.size() == d,
        ErrorCode::ShapeMismatch, "point encoder weights do not match out_channels");
  const auto keyed = sorted_keys(cloud, spec, /*drop_height=*/true);

  SparseTensor2D out;
  out.stride = 1;
  out.extents = spec.pillar_extents();
  std::vector<Real> rows;
  std::size_t begin = 0;
  while (begin < keyed.size()) {
    const std::size_t row0 = rows.size();
    rows.resize(row0 + d, 0.0);  // ReLU output is non-negative
    std::size_t end = begin;
    while (end < keyed.size() && keyed[end].key == keyed[begin].key) {
      const Point& p = cloud.points[keyed[end].index];
      for (std::size_t o = 0; o < d; ++o) {
        const Real* w = &weights.weight[o * 4];
        const Real v = weights.bias[o] + w[0] * p.x + w[1] * p.y + w[2] * p.z +
                       w[3] * p.intensity;
        rows[row0 + o] = std::max(rows[row0 + o], std::max<Real>(v, 0));
      }
      ++end;
    }
    const Coord3 v = *spec.voxel_of(cloud.points[keyed[begin].index]);
    out.coords.push_back({v[0], v[1]});
    begin = end;
  }
  out.features = FeatureMatrix(out.coords.size(), d);
  out.features.data() = std::move(rows);
  return out;
}

}  // namespace vpf
