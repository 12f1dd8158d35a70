// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vpf/error.hpp"

namespace vpf {

using Real = double;

template <std::size_t Dim>
using Coord = std::array<std::int32_t, Dim>;

using Coord2 = Coord<2>;
using Coord3 = Coord<3>;

// Row-major (rows x cols) block of features; row i belongs to site i.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, Real fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<Real> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const Real> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Real& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  Real operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::vector<Real>& data() noexcept { return data_; }
  const std::vector<Real>& data() const noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](Real v) { return std::isfinite(v); });
  }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

// Active sites on an integer lattice plus one feature row per site.
// `stride` is the BEV downsampling factor relative to the input grid and
// `extents` the lattice size at that stride.
template <std::size_t Dim>
struct SparseTensor {
  std::vector<Coord<Dim>> coords;
  FeatureMatrix features;
  int stride = 1;
  Coord<Dim> extents{};

  std::size_t size() const noexcept { return coords.size(); }
  std::size_t channels() const noexcept { return features.cols(); }

  bool operator==(const SparseTensor&) const = default;
};

using SparseTensor2D = SparseTensor<2>;
using SparseTensor3D = SparseTensor<3>;

template <std::size_t Dim>
bool in_extents(const Coord<Dim>& c, const Coord<Dim>& extents) noexcept {
  for (std::size_t a = 0; a < Dim; ++a) {
    if (c[a] < 0 || c[a] >= extents[a]) return false;
  }
  return true;
}

// Row-major linear index of `c` inside `extents`.
template <std::size_t Dim>
std::int64_t linear_index(const Coord<Dim>& c, const Coord<Dim>& extents) noexcept {
  std::int64_t key = 0;
  for (std::size_t a = 0; a < Dim; ++a) key = key * extents[a] + c[a];
  return key;
}

// Throws unless coords are strictly increasing (sorted, unique), inside
// extents, row count matches, and every feature is finite.
template <std::size_t Dim>
void validate(const SparseTensor<Dim>& t) {
  check(t.features.rows() == t.coords.size(), ErrorCode::ShapeMismatch,
        "feature rows do not match coordinate count");
  check(t.stride > 0, ErrorCode::InvalidArgument, "stride must be positive");
  for (std::size_t i = 0; i < t.coords.size(); ++i) {
    check(in_extents(t.coords[i], t.extents), ErrorCode::OutOfRange,
          "coordinate outside tensor extents");
    if (i > 0) {
      check(t.coords[i - 1] < t.coords[i], ErrorCode::InvalidArgument,
            "coordinates must be sorted and unique");
    }
  }
  check(t.features.all_finite(), ErrorCode::InvalidArgument,
        "non-finite feature value");
}

// X-Y projection of sorted 3D coords; result is sorted and unique.
inline std::vector<Coord2> bev_projection(std::span<const Coord3> coords) {
  std::vector<Coord2> out;
  out.reserve(coords.size());
  for (const auto& c : coords) {
    Coord2 p{c[0], c[1]};
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  return out;
}

inline bool bev_consistent(const SparseTensor3D& voxels,
                           const SparseTensor2D& pillars) {
  return bev_projection(voxels.coords) == pillars.coords;
}

}  // namespace vpf
