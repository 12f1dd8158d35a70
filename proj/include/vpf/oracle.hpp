// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations. Each works on dense arrays or
// exhaustive enumeration and shares no code path with the module it checks.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vpf/analysis.hpp"
#include "vpf/backbone.hpp"
#include "vpf/conv.hpp"
#include "vpf/geometry.hpp"
#include "vpf/losses.hpp"
#include "vpf/tensor.hpp"

namespace vpf::oracle {

// Densify, convolve every lattice site, keep the active output sites.
template <std::size_t Dim>
SparseTensor<Dim> dense_conv(const SparseTensor<Dim>& x, const ConvSpec<Dim>& spec,
                             const ConvWeights& w);

// c_ij = 1 iff voxel i and pillar j share a BEV coordinate.
std::vector<std::vector<std::uint8_t>> index_matrix(const SparseTensor3D& voxels,
                                                    const SparseTensor2D& pillars);

// Per pillar, the channelwise max over every voxel in its column.
FeatureMatrix group_max(const SparseTensor3D& voxels, const SparseTensor2D& pillars);
// Per voxel, the features of the pillar in its column.
FeatureMatrix group_broadcast(const SparseTensor2D& pillars, const SparseTensor3D& voxels);

// Uniform samples over the axis-aligned box enclosing both boxes' corners.
double monte_carlo_iou(const Box3D& a, const Box3D& b, std::size_t samples, std::uint64_t seed);

struct BinCounts {
  std::size_t inside = 0;
  std::array<std::size_t, kDensityBins> z{};
};
// Per-point interval tests against each of the ten vertical bins.
BinCounts density_bins(const PointCloud& cloud, const Box3D& box);

// Maximum-cardinality matching over `eligible[g][p]`, exhaustive over every
// assignment (at most 16 predictions).
std::size_t max_matching(const std::vector<std::vector<bool>>& eligible);

// Column-wise reshape of a dense (L, W, H, C) array.
SparseTensor2D height_compress(const SparseTensor3D& x);

// Dense accumulation of `coarse` onto the lattice of `fine`.
DenseFeatureMap merge(const SparseTensor2D& fine, const SparseTensor2D& coarse);

double focal(double p, bool positive, double alpha, double gamma);

// Term-by-term recomposition of the overall loss.
double overall_loss(const std::vector<ClassificationTerm>& cls, const std::vector<IouTerm>& iou,
                    const std::vector<RegressionTerm>& reg, const std::vector<DiouTerm>& diou,
                    const LossWeights& weights);

}  // namespace vpf::oracle
