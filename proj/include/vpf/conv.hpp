// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vpf/tensor.hpp"

namespace vpf {

enum class ConvMode { Submanifold, Regular };

template <std::size_t Dim>
struct ConvSpec {
  Coord<Dim> kernel{};
  Coord<Dim> stride{};
  Coord<Dim> padding{};
  int in_channels = 0;
  int out_channels = 0;
  ConvMode mode = ConvMode::Submanifold;

  // Odd cubic kernel, stride 1; padding is implied as (k - 1) / 2.
  static ConvSpec submanifold(int kernel_size, int in, int out);
  static ConvSpec regular(int kernel_size, int stride, int padding, int in, int out);

  int kernel_volume() const noexcept;

  // floor((extent + 2 * padding - kernel) / stride) + 1 per axis for regular
  // mode; identity for submanifold.
  Coord<Dim> output_extents(const Coord<Dim>& in_extents) const;

  // Throws SpecMismatch on invalid geometry or channel counts.
  void validate() const;
};

// Kernel tensor laid out as (offset, in_channel, out_channel). Kernel offsets
// enumerate the window row-major over the axes.
struct ConvWeights {
  int kernel_volume = 0;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<Real> kernel;
  std::vector<Real> bias;  // empty for bias-free layers

  static ConvWeights zeros(int kernel_volume, int in, int out, bool with_bias = false);

  Real& at(int offset, int in, int out) noexcept {
    return kernel[(static_cast<std::size_t>(offset) * in_channels + in) * out_channels + out];
  }
  Real at(int offset, int in, int out) const noexcept {
    return kernel[(static_cast<std::size_t>(offset) * in_channels + in) * out_channels + out];
  }

  bool has_bias() const noexcept { return !bias.empty(); }
};

struct KernelMapEntry {
  std::uint32_t input;
  std::uint32_t output;
  std::uint32_t offset;

  auto operator<=>(const KernelMapEntry&) const = default;
};

// Rulebook: every (input site, output site, kernel offset) contribution,
// sorted by (offset, output, input).
template <std::size_t Dim>
struct KernelMap {
  std::vector<KernelMapEntry> entries;
  std::vector<Coord<Dim>> output_coords;
  Coord<Dim> output_extents{};
};

template <std::size_t Dim>
KernelMap<Dim> build_kernel_map(std::span<const Coord<Dim>> coords_in,
                                const ConvSpec<Dim>& spec,
                                const Coord<Dim>& in_extents);

// Gather-multiply-scatter over the rulebook. Accumulates in rulebook order.
template <std::size_t Dim>
SparseTensor<Dim> sparse_conv(const SparseTensor<Dim>& x, const ConvSpec<Dim>& spec,
                              const ConvWeights& weights, const KernelMap<Dim>& map);

// Builds the map from x and runs the convolution.
template <std::size_t Dim>
SparseTensor<Dim> sparse_conv(const SparseTensor<Dim>& x, const ConvSpec<Dim>& spec,
                              const ConvWeights& weights) {
  return sparse_conv(x, spec, weights,
                     build_kernel_map<Dim>(x.coords, spec, x.extents));
}

// Regular sparse conv on both branches with shared X-Y geometry. Throws
// SpecMismatch if the X-Y components differ, ConsistencyViolation if the BEV
// sets of the inputs or of the outputs disagree.
std::pair<SparseTensor3D, SparseTensor2D> paired_downsample(
    const SparseTensor3D& voxels, const SparseTensor2D& pillars,
    const ConvSpec<3>& spec3d, const ConvSpec<2>& spec2d,
    const ConvWeights& w3d, const ConvWeights& w2d);

void relu_inplace(FeatureMatrix& features) noexcept;

extern template struct ConvSpec<2>;
extern template struct ConvSpec<3>;

}  // namespace vpf
