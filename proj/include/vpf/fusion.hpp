// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vpf/conv.hpp"
#include "vpf/tensor.hpp"

namespace vpf {

// Sparse form of the voxel-pillar index matrix: c_ij = 1 iff voxel i and
// pillar j share (l, w). Pillar j owns pillar_voxels[pillar_offsets[j] ..
// pillar_offsets[j + 1]).
struct VoxelPillarCorrespondence {
  std::vector<std::uint32_t> voxel_to_pillar;
  std::vector<std::uint32_t> pillar_offsets;
  std::vector<std::uint32_t> pillar_voxels;

  // Layouts of the two tensors the correspondence was built from.
  std::vector<Coord3> voxel_coords;
  std::vector<Coord2> pillar_coords;
  Coord3 voxel_extents{};
  Coord2 pillar_extents{};
  int stride = 1;

  std::size_t num_voxels() const noexcept { return voxel_to_pillar.size(); }
  std::size_t num_pillars() const noexcept { return pillar_coords.size(); }

  std::span<const std::uint32_t> voxels_of(std::size_t pillar) const noexcept {
    return {pillar_voxels.data() + pillar_offsets[pillar],
            pillar_offsets[pillar + 1] - pillar_offsets[pillar]};
  }
};

// Linear merge of the two lexicographically sorted coordinate streams.
// Throws ConsistencyViolation unless BEV(voxels) == pillars.
VoxelPillarCorrespondence build_correspondence(const SparseTensor3D& voxels,
                                               const SparseTensor2D& pillars);

// Elementwise max over each pillar's voxels; result lives on the pillar
// coordinates with the voxel channel count.
SparseTensor2D sparse_pool(const SparseTensor3D& voxels,
                           const VoxelPillarCorrespondence& corr);

// Copies each pillar's feature to every voxel of its column.
SparseTensor3D broadcast(const SparseTensor2D& pillars,
                         const VoxelPillarCorrespondence& corr);

struct SflWeights {
  int kernel_size = 3;
  ConvWeights voxel_to_pillar;  // 2D submanifold, D_v -> D_p
  ConvWeights pillar_to_voxel;  // 2D submanifold, D_p -> D_v
};

// Bidirectional exchange: f_p += conv(pool(f_v)), f_v += broadcast(conv(f_p)).
std::pair<SparseTensor3D, SparseTensor2D> sparse_fusion_layer(
    const SparseTensor3D& voxels, const SparseTensor2D& pillars,
    const VoxelPillarCorrespondence& corr, const SflWeights& weights);

}  // namespace vpf
