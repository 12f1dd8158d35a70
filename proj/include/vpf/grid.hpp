// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "vpf/tensor.hpp"

namespace vpf {

using Vec3 = std::array<double, 3>;

struct Point {
  double x = 0;
  double y = 0;
  double z = 0;
  double intensity = 0;

  bool operator==(const Point&) const = default;
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
};

// Voxelization geometry shared by the voxel and pillar branches. The pillar
// lattice is the X-Y restriction of the voxel lattice.
class GridSpec {
 public:
  // Throws InvalidArgument on an empty range, non-positive voxel size, or a
  // lattice too large to pack into a 62-bit key.
  static GridSpec create(const Vec3& range_min, const Vec3& range_max,
                         const Vec3& voxel_size);

  const Vec3& range_min() const noexcept { return range_min_; }
  const Vec3& range_max() const noexcept { return range_max_; }
  const Vec3& voxel_size() const noexcept { return voxel_size_; }
  const Coord3& extents() const noexcept { return extents_; }
  Coord2 pillar_extents() const noexcept { return {extents_[0], extents_[1]}; }

  // Half-open cells: nullopt for any point outside [min, max) or beyond the
  // integral extents.
  std::optional<Coord3> voxel_of(const Point& p) const noexcept;

  std::int64_t pack(const Coord3& c) const noexcept {
    return linear_index(c, extents_);
  }

  bool operator==(const GridSpec&) const = default;

 private:
  GridSpec() = default;

  Vec3 range_min_{};
  Vec3 range_max_{};
  Vec3 voxel_size_{};
  Coord3 extents_{};
};

struct VoxelAssignment {
  std::vector<std::optional<Coord3>> indices;  // one per input point
  std::size_t dropped = 0;

  std::size_t assigned() const noexcept { return indices.size() - dropped; }
};

// Single linear layer + ReLU applied per point before pillar max-pooling.
struct PointEncoderWeights {
  std::size_t out_channels = 0;
  std::vector<Real> weight;  // out_channels x 4, row-major
  std::vector<Real> bias;    // out_channels
};

VoxelAssignment assign_voxel_indices(const PointCloud& cloud, const GridSpec& spec);

// Mean of (x, y, z, intensity) per non-empty voxel. Throws EmptyGrid.
SparseTensor3D build_voxel_features(const PointCloud& cloud, const GridSpec& spec);

// Max over ReLU(W p + b) per non-empty pillar. Throws EmptyGrid or
// ShapeMismatch.
SparseTensor2D build_pillar_features(const PointCloud& cloud, const GridSpec& spec,
                                     const PointEncoderWeights& weights);

}  // namespace vpf
