// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded random instances for property checks.

#pragma once

#include <random>
#include <utility>

#include "vpf/conv.hpp"
#include "vpf/geometry.hpp"
#include "vpf/grid.hpp"
#include "vpf/tensor.hpp"

namespace vpf::gen {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

// Each site is active with probability `density`; features in [-1, 1).
template <std::size_t Dim>
SparseTensor<Dim> sparse_tensor(Rng& rng, const Coord<Dim>& extents, double density,
                                int channels, int stride = 1);

// Voxels at `density` and the pillars of their BEV projection.
std::pair<SparseTensor3D, SparseTensor2D> paired_tensors(Rng& rng, const Coord3& extents,
                                                         double density, int voxel_channels,
                                                         int pillar_channels);

// `n` points, about 10% of them outside the grid range.
PointCloud cloud(Rng& rng, const GridSpec& grid, std::size_t n);

ConvWeights conv_weights(Rng& rng, int kernel_volume, int in, int out, bool with_bias);

// Center in [-spread, spread]^3, dims in [min_dim, max_dim], heading in
// (-pi, pi] or 0.
Box3D box(Rng& rng, double spread, double min_dim, double max_dim, bool rotated);

}  // namespace vpf::gen
