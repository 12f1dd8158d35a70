// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/fusion.hpp"

#include <algorithm>

namespace vpf {

namespace {

void require_layout(const VoxelPillarCorrespondence& corr, std::size_t n, bool voxel_side) {
  const std::size_t expected = voxel_side ? corr.num_voxels() : corr.num_pillars();
  check(n == expected, ErrorCode::ShapeMismatch,
        voxel_side ? "voxel count does not match correspondence"
                   : "pillar count does not match correspondence");
}

}  // namespace

VoxelPillarCorrespondence build_correspondence(const SparseTensor3D& voxels,
                                               const SparseTensor2D& pillars) {
  check(voxels.extents[0] == pillars.extents[0] && voxels.extents[1] == pillars.extents[1],
        ErrorCode::ConsistencyViolation, "voxel and pillar BEV extents differ");

  VoxelPillarCorrespondence corr;
  corr.voxel_to_pillar.resize(voxels.size());
  corr.pillar_offsets.assign(pillars.size() + 1, 0);
  corr.pillar_voxels.reserve(voxels.size());

  std::size_t j = 0;
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    const Coord2 bev{voxels.coords[i][0], voxels.coords[i][1]};
    while (j < pillars.size() && pillars.coords[j] < bev) {
      check(corr.pillar_voxels.size() > corr.pillar_offsets[j], ErrorCode::ConsistencyViolation,
            "pillar has no voxel in its column");
      corr.pillar_offsets[++j] = static_cast<std::uint32_t>(corr.pillar_voxels.size());
    }
    check(j < pillars.size() && pillars.coords[j] == bev, ErrorCode::ConsistencyViolation,
          "voxel column has no matching pillar");
    corr.voxel_to_pillar[i] = static_cast<std::uint32_t>(j);
    corr.pillar_voxels.push_back(static_cast<std::uint32_t>(i));
  }
  // Close the last open pillar, then every remaining pillar must be empty.
  if (!voxels.coords.empty()) {
    corr.pillar_offsets[++j] = static_cast<std::uint32_t>(corr.pillar_voxels.size());
  }
  check(j == pillars.size(), ErrorCode::ConsistencyViolation,
        "pillar has no voxel in its column");

  corr.voxel_coords = voxels.coords;
  corr.pillar_coords = pillars.coords;
  corr.voxel_extents = voxels.extents;
  corr.pillar_extents = pillars.extents;
  corr.stride = pillars.stride;
  return corr;
}

SparseTensor2D sparse_pool(const SparseTensor3D& voxels,
                           const VoxelPillarCorrespondence& corr) {
  require_layout(corr, voxels.size(), true);
  const std::size_t d = voxels.channels();
  SparseTensor2D out;
  out.coords = corr.pillar_coords;
  out.extents = corr.pillar_extents;
  out.stride = corr.stride;
  out.features = FeatureMatrix(corr.num_pillars(), d);
  for (std::size_t j = 0; j < corr.num_pillars(); ++j) {
    const auto members = corr.voxels_of(j);
    auto dst = out.features.row(j);
    const auto first = voxels.features.row(members.front());
    std::copy(first.begin(), first.end(), dst.begin());
    for (std::size_t m = 1; m < members.size(); ++m) {
      const auto src = voxels.features.row(members[m]);
      for (std::size_t c = 0; c < d; ++c) dst[c] = std::max(dst[c], src[c]);
    }
  }
  return out;
}

SparseTensor3D broadcast(const SparseTensor2D& pillars,
                         const VoxelPillarCorrespondence& corr) {
  require_layout(corr, pillars.size(), false);
  SparseTensor3D out;
  out.coords = corr.voxel_coords;
  out.extents = corr.voxel_extents;
  out.stride = corr.stride;
  out.features = FeatureMatrix(corr.num_voxels(), pillars.channels());
  for (std::size_t i = 0; i < corr.num_voxels(); ++i) {
    const auto src = pillars.features.row(corr.voxel_to_pillar[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
  }
  return out;
}

std::pair<SparseTensor3D, SparseTensor2D> sparse_fusion_layer(
    const SparseTensor3D& voxels, const SparseTensor2D& pillars,
    const VoxelPillarCorrespondence& corr, const SflWeights& weights) {
  require_layout(corr, voxels.size(), true);
  require_layout(corr, pillars.size(), false);
  const int dv = static_cast<int>(voxels.channels());
  const int dp = static_cast<int>(pillars.channels());
  check(weights.voxel_to_pillar.in_channels == dv &&
            weights.voxel_to_pillar.out_channels == dp &&
            weights.pillar_to_voxel.in_channels == dp &&
            weights.pillar_to_voxel.out_channels == dv,
        ErrorCode::ShapeMismatch, "fusion transform weights do not match branch channels");

  const auto v2p_spec = ConvSpec<2>::submanifold(weights.kernel_size, dv, dp);
  const auto p2v_spec = ConvSpec<2>::submanifold(weights.kernel_size, dp, dv);
  const auto map = build_kernel_map<2>(pillars.coords, v2p_spec, pillars.extents);

  const auto pooled = sparse_conv(sparse_pool(voxels, corr), v2p_spec,
                                  weights.voxel_to_pillar, map);
  const auto spread = broadcast(sparse_conv(pillars, p2v_spec, weights.pillar_to_voxel, map),
                                corr);

  std::pair<SparseTensor3D, SparseTensor2D> out{voxels, pillars};
  auto& fv = out.first.features.data();
  auto& fp = out.second.features.data();
  for (std::size_t k = 0; k < fv.size(); ++k) fv[k] += spread.features.data()[k];
  for (std::size_t k = 0; k < fp.size(); ++k) fp[k] += pooled.features.data()[k];
  return out;
}

}  // namespace vpf
