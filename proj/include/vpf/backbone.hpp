// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vpf/conv.hpp"
#include "vpf/fusion.hpp"
#include "vpf/grid.hpp"
#include "vpf/weights.hpp"

namespace vpf {

inline constexpr int kEncoderSteps = 4;
inline constexpr int kReadoutSteps = 2;  // 16x and 32x

enum class Variant { Dense, Sparse };

const char* to_string(Variant v) noexcept;
Variant parse_variant(const std::string& name);

struct BackboneConfig {
  Variant variant = Variant::Dense;
  std::array<int, kEncoderSteps> voxel_channels{16, 32, 64, 64};
  std::array<int, kEncoderSteps> pillar_channels{32, 64, 128, 256};
  int submanifold_layers = 2;
  std::array<bool, kEncoderSteps> sfl_steps{true, true, true, true};
  int sfl_kernel = 3;
  bool block_activation = true;  // ReLU after every encoder conv

  // Dense Fusion Neck: Block(M, D) at 8x and 16x per branch.
  int neck_layers = 5;
  int neck_channels = 128;
  bool neck_activation = true;

  // Sparse readout: extra 16x / 32x downsampling blocks.
  std::array<int, kReadoutSteps> extra_voxel_channels{128, 128};
  std::array<int, kReadoutSteps> extra_pillar_channels{256, 256};
  int readout_channels = 256;

  static BackboneConfig defaults(Variant variant);
  void validate() const;

  bool operator==(const BackboneConfig&) const = default;
};

// Lattice extents of the voxel branch after each encoder step (index 0..3)
// and each readout step (index 4..5).
std::vector<Coord3> voxel_extents_per_scale(const GridSpec& grid, const BackboneConfig& cfg);

// Shared downsampling geometry: kernel 3, stride 2, padding 1.
ConvSpec<3> downsample_spec_3d(int in, int out);
ConvSpec<2> downsample_spec_2d(int in, int out);

// Regular conv (absent at step 0) followed by submanifold layers.
struct BlockWeights {
  std::optional<ConvWeights> down;
  std::vector<ConvWeights> submanifold;
};

// (3x3 conv, channelwise affine, optional ReLU) layer of a dense block.
struct DenseLayerWeights {
  ConvWeights conv;
  std::vector<Real> scale;
  std::vector<Real> shift;
};

struct NeckBranchWeights {
  std::vector<DenseLayerWeights> block8;
  std::vector<DenseLayerWeights> block16;  // first layer has stride 2
};

struct ModelWeights {
  PointEncoderWeights point_encoder;
  std::array<BlockWeights, kEncoderSteps> voxel_blocks;
  std::array<BlockWeights, kEncoderSteps> pillar_blocks;
  std::array<std::optional<SflWeights>, kEncoderSteps> sfl;

  // Dense variant.
  NeckBranchWeights neck_voxel;
  NeckBranchWeights neck_pillar;

  // Sparse variant.
  std::array<BlockWeights, kReadoutSteps> readout_voxel_blocks;
  std::array<BlockWeights, kReadoutSteps> readout_pillar_blocks;
  std::array<ConvWeights, kReadoutSteps + 1> readout_voxel_proj;  // 8x, 16x, 32x
};

// Draws every tensor the configured model needs from `source`, by name.
ModelWeights make_model_weights(const GridSpec& grid, const BackboneConfig& cfg,
                                ParameterSource& source);

struct EncoderStep {
  SparseTensor3D voxels;
  SparseTensor2D pillars;
};

std::vector<EncoderStep> encoder_forward(const PointCloud& cloud, const GridSpec& grid,
                                         const BackboneConfig& cfg,
                                         const ModelWeights& weights);

// Same, starting from already voxelized initial tensors.
std::vector<EncoderStep> encoder_forward(const SparseTensor3D& voxels,
                                         const SparseTensor2D& pillars,
                                         const BackboneConfig& cfg,
                                         const ModelWeights& weights);

// Single-branch encoders (no fusion); one tensor per step.
std::vector<SparseTensor3D> voxel_encoder_forward(const SparseTensor3D& voxels,
                                                  const BackboneConfig& cfg,
                                                  const ModelWeights& weights);
std::vector<SparseTensor2D> pillar_encoder_forward(const SparseTensor2D& pillars,
                                                   const BackboneConfig& cfg,
                                                   const ModelWeights& weights);

struct DenseFeatureMap {
  int rows = 0;  // L'
  int cols = 0;  // W'
  int channels = 0;
  int stride = 1;
  std::vector<Real> values;  // (row, col, channel) row-major

  DenseFeatureMap() = default;
  DenseFeatureMap(int rows, int cols, int channels, int stride);

  Real* at(int r, int c) noexcept {
    return values.data() + (static_cast<std::size_t>(r) * cols + c) * channels;
  }
  const Real* at(int r, int c) const noexcept {
    return values.data() + (static_cast<std::size_t>(r) * cols + c) * channels;
  }

  bool operator==(const DenseFeatureMap&) const = default;
};

// Concatenates each BEV column's voxel features by ascending height into
// H' * D_v channels; absent heights are zero.
SparseTensor2D height_compress(const SparseTensor3D& x);

DenseFeatureMap densify(const SparseTensor2D& x);
DenseFeatureMap densify(const SparseTensor3D& x);

// Inverse of densify for maps without all-zero feature vectors.
SparseTensor2D sparsify(const DenseFeatureMap& map);

// Zero-padded dense 2D convolution; kernel offsets row-major.
DenseFeatureMap dense_conv2d(const DenseFeatureMap& x, const ConvWeights& w, int kernel,
                             int stride, int padding);

// VPF_de readout: Block(M, D) stacks at 8x and 16x per branch, summation
// across branches, nearest x2 upsampling of the 16x map and channel
// concatenation. Output has 2D channels at 8x stride.
DenseFeatureMap dense_fusion_neck(const std::vector<EncoderStep>& steps,
                                  const ModelWeights& weights, const BackboneConfig& cfg);

// VPF_sp readout: 16x / 32x paired downsampling, height compression with
// projection to readout_channels, multi-scale merge onto the 8x lattice.
SparseTensor2D sparse_readout(const std::vector<EncoderStep>& steps,
                              const ModelWeights& weights, const BackboneConfig& cfg);

// Maps coords at stride s * ratio onto the stride-s lattice (c -> c * ratio)
// and sums the features into `acc`, keeping the union of sites.
SparseTensor2D merge_onto(const SparseTensor2D& acc, const SparseTensor2D& coarse);

struct ForwardResult {
  std::vector<EncoderStep> steps;
  std::optional<DenseFeatureMap> dense;
  std::optional<SparseTensor2D> sparse;
};

class Backbone {
 public:
  // Seeded weights when `manifest` is null; otherwise the manifest must hold
  // exactly the tensors the configuration needs.
  Backbone(const GridSpec& grid, const BackboneConfig& cfg, std::uint64_t seed,
           const WeightStore* manifest = nullptr);

  ForwardResult forward(const PointCloud& cloud) const;

  const GridSpec& grid() const noexcept { return grid_; }
  const BackboneConfig& config() const noexcept { return cfg_; }
  const ModelWeights& weights() const noexcept { return weights_; }
  const WeightStore& parameters() const noexcept { return parameters_; }

 private:
  GridSpec grid_;
  BackboneConfig cfg_;
  ModelWeights weights_;
  WeightStore parameters_;
};

}  // namespace vpf
