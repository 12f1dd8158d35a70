// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/conv.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <unordered_map>

namespace vpf {

namespace {

template <std::size_t Dim>
Coord<Dim> kernel_offset(int index, const Coord<Dim>& kernel) noexcept {
  Coord<Dim> k{};
  for (std::size_t a = Dim; a-- > 0;) {
    k[a] = index % kernel[a];
    index /= kernel[a];
  }
  return k;
}

template <std::size_t Dim>
Coord<Dim> decode(std::int64_t key, const Coord<Dim>& extents) noexcept {
  Coord<Dim> c{};
  for (std::size_t a = Dim; a-- > 0;) {
    c[a] = static_cast<std::int32_t>(key % extents[a]);
    key /= extents[a];
  }
  return c;
}

template <std::size_t Dim>
KernelMap<Dim> submanifold_map(std::span<const Coord<Dim>> coords,
                               const ConvSpec<Dim>& spec, const Coord<Dim>& extents) {
  std::unordered_map<std::int64_t, std::uint32_t> index;
  index.reserve(coords.size() * 2);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    index.emplace(linear_index(coords[i], extents), static_cast<std::uint32_t>(i));
  }

  KernelMap<Dim> map;
  map.output_coords.assign(coords.begin(), coords.end());
  map.output_extents = extents;
  const int volume = spec.kernel_volume();
  for (int k = 0; k < volume; ++k) {
    const Coord<Dim> off = kernel_offset(k, spec.kernel);
    for (std::size_t o = 0; o < coords.size(); ++o) {
      Coord<Dim> nb{};
      for (std::size_t a = 0; a < Dim; ++a) {
        nb[a] = coords[o][a] - spec.padding[a] + off[a];
      }
      if (!in_extents(nb, extents)) continue;
      const auto it = index.find(linear_index(nb, extents));
      if (it == index.end()) continue;
      map.entries.push_back({it->second, static_cast<std::uint32_t>(o),
                             static_cast<std::uint32_t>(k)});
    }
  }
  return map;
}

template <std::size_t Dim>
KernelMap<Dim> regular_map(std::span<const Coord<Dim>> coords, const ConvSpec<Dim>& spec,
                           const Coord<Dim>& extents) {
  KernelMap<Dim> map;
  map.output_extents = spec.output_extents(extents);
  const int volume = spec.kernel_volume();

  struct Raw {
    std::int64_t out_key;
    std::uint32_t offset;
    std::uint32_t input;
  };
  std::vector<Raw> raw;
  raw.reserve(coords.size() * static_cast<std::size_t>(volume));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (int k = 0; k < volume; ++k) {
      const Coord<Dim> off = kernel_offset(k, spec.kernel);
      Coord<Dim> o{};
      bool valid = true;
      for (std::size_t a = 0; a < Dim && valid; ++a) {
        const int t = coords[i][a] + spec.padding[a] - off[a];
        valid = t >= 0 && t % spec.stride[a] == 0 &&
                t / spec.stride[a] < map.output_extents[a];
        o[a] = valid ? t / spec.stride[a] : 0;
      }
      if (!valid) continue;
      raw.push_back({linear_index(o, map.output_extents), static_cast<std::uint32_t>(k),
                     static_cast<std::uint32_t>(i)});
    }
  }

  std::vector<std::int64_t> keys;
  keys.reserve(raw.size());
  for (const auto& r : raw) keys.push_back(r.out_key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  map.output_coords.reserve(keys.size());
  for (const auto key : keys) map.output_coords.push_back(decode(key, map.output_extents));

  map.entries.reserve(raw.size());
  for (const auto& r : raw) {
    const auto pos = std::lower_bound(keys.begin(), keys.end(), r.out_key) - keys.begin();
    map.entries.push_back({r.input, static_cast<std::uint32_t>(pos), r.offset});
  }
  std::sort(map.entries.begin(), map.entries.end(),
            [](const KernelMapEntry& a, const KernelMapEntry& b) {
              return std::tie(a.offset, a.output, a.input) <
                     std::tie(b.offset, b.output, b.input);
            });
  return map;
}

}  // namespace

template <std::size_t Dim>
ConvSpec<Dim> ConvSpec<Dim>::submanifold(int kernel_size, int in, int out) {
  ConvSpec s;
  s.kernel.fill(kernel_size);
  s.stride.fill(1);
  s.padding.fill((kernel_size - 1) / 2);
  s.in_channels = in;
  s.out_channels = out;
  s.mode = ConvMode::Submanifold;
  s.validate();
  return s;
}

template <std::size_t Dim>
ConvSpec<Dim> ConvSpec<Dim>::regular(int kernel_size, int stride, int padding, int in,
                                     int out) {
  ConvSpec s;
  s.kernel.fill(kernel_size);
  s.stride.fill(stride);
  s.padding.fill(padding);
  s.in_channels = in;
  s.out_channels = out;
  s.mode = ConvMode::Regular;
  s.validate();
  return s;
}

template <std::size_t Dim>
int ConvSpec<Dim>::kernel_volume() const noexcept {
  int v = 1;
  for (auto k : kernel) v *= k;
  return v;
}

template <std::size_t Dim>
Coord<Dim> ConvSpec<Dim>::output_extents(const Coord<Dim>& in_extents) const {
  if (mode == ConvMode::Submanifold) return in_extents;
  Coord<Dim> out{};
  for (std::size_t a = 0; a < Dim; ++a) {
    const int span = in_extents[a] + 2 * padding[a] - kernel[a];
    check(span >= 0, ErrorCode::SpecMismatch, "kernel larger than padded extent");
    out[a] = span / stride[a] + 1;
  }
  return out;
}

template <std::size_t Dim>
void ConvSpec<Dim>::validate() const {
  check(in_channels > 0 && out_channels > 0, ErrorCode::SpecMismatch,
        "channel counts must be positive");
  for (std::size_t a = 0; a < Dim; ++a) {
    check(kernel[a] > 0 && stride[a] > 0 && padding[a] >= 0, ErrorCode::SpecMismatch,
          "kernel and stride must be positive, padding non-negative");
    if (mode == ConvMode::Submanifold) {
      check(stride[a] == 1, ErrorCode::SpecMismatch, "submanifold conv requires stride 1");
      check(kernel[a] % 2 == 1, ErrorCode::SpecMismatch,
            "submanifold conv requires an odd kernel");
    }
  }
}

template struct ConvSpec<2>;
template struct ConvSpec<3>;

ConvWeights ConvWeights::zeros(int kernel_volume, int in, int out, bool with_bias) {
  ConvWeights w;
  w.kernel_volume = kernel_volume;
  w.in_channels = in;
  w.out_channels = out;
  w.kernel.assign(static_cast<std::size_t>(kernel_volume) * in * out, 0.0);
  if (with_bias) w.bias.assign(static_cast<std::size_t>(out), 0.0);
  return w;
}

template <std::size_t Dim>
KernelMap<Dim> build_kernel_map(std::span<const Coord<Dim>> coords_in,
                                const ConvSpec<Dim>& spec, const Coord<Dim>& in_extents) {
  spec.validate();
  if (spec.mode == ConvMode::Submanifold) {
    for (std::size_t a = 0; a < Dim; ++a) {
      check(spec.padding[a] == (spec.kernel[a] - 1) / 2, ErrorCode::SpecMismatch,
            "submanifold padding must be (kernel - 1) / 2");
    }
    return submanifold_map(coords_in, spec, in_extents);
  }
  return regular_map(coords_in, spec, in_extents);
}

template <std::size_t Dim>
SparseTensor<Dim> sparse_conv(const SparseTensor<Dim>& x, const ConvSpec<Dim>& spec,
                              const ConvWeights& weights, const KernelMap<Dim>& map) {
  const auto cin = static_cast<std::size_t>(spec.in_channels);
  const auto cout = static_cast<std::size_t>(spec.out_channels);
  check(x.channels() == cin, ErrorCode::ShapeMismatch,
        "input has " + std::to_string(x.channels()) + " channels, conv expects " +
            std::to_string(cin));
  check(weights.in_channels == spec.in_channels &&
            weights.out_channels == spec.out_channels &&
            weights.kernel_volume == spec.kernel_volume() &&
            weights.kernel.size() == static_cast<std::size_t>(spec.kernel_volume()) * cin * cout,
        ErrorCode::ShapeMismatch, "conv weights do not match conv spec");
  check(!weights.has_bias() || weights.bias.size() == cout, ErrorCode::ShapeMismatch,
        "conv bias length does not match out_channels");

  SparseTensor<Dim> out;
  out.coords = map.output_coords;
  out.extents = map.output_extents;
  out.stride = x.stride * spec.stride[0];
  out.features = FeatureMatrix(out.coords.size(), cout);
  if (weights.has_bias()) {
    for (std::size_t o = 0; o < out.size(); ++o) {
      std::copy(weights.bias.begin(), weights.bias.end(), out.features.row(o).begin());
    }
  }

  const std::size_t n_in = x.size();
  const std::size_t n_out = out.size();
  for (const auto& e : map.entries) {
    check(e.input < n_in && e.output < n_out &&
              static_cast<int>(e.offset) < spec.kernel_volume(),
          ErrorCode::ShapeMismatch, "kernel map does not belong to this input");
    const auto src = x.features.row(e.input);
    auto dst = out.features.row(e.output);
    const Real* w = &weights.kernel[static_cast<std::size_t>(e.offset) * cin * cout];
    for (std::size_t c = 0; c < cin; ++c) {
      const Real v = src[c];
      const Real* wr = w + c * cout;
      for (std::size_t o = 0; o < cout; ++o) dst[o] += v * wr[o];
    }
  }
  return out;
}

template KernelMap<2> build_kernel_map<2>(std::span<const Coord2>, const ConvSpec<2>&,
                                          const Coord2&);
template KernelMap<3> build_kernel_map<3>(std::span<const Coord3>, const ConvSpec<3>&,
                                          const Coord3&);
template SparseTensor2D sparse_conv<2>(const SparseTensor2D&, const ConvSpec<2>&,
                                       const ConvWeights&, const KernelMap<2>&);
template SparseTensor3D sparse_conv<3>(const SparseTensor3D&, const ConvSpec<3>&,
                                       const ConvWeights&, const KernelMap<3>&);

std::pair<SparseTensor3D, SparseTensor2D> paired_downsample(
    const SparseTensor3D& voxels, const SparseTensor2D& pillars,
    const ConvSpec<3>& spec3d, const ConvSpec<2>& spec2d, const ConvWeights& w3d,
    const ConvWeights& w2d) {
  check(spec3d.mode == ConvMode::Regular && spec2d.mode == ConvMode::Regular,
        ErrorCode::SpecMismatch, "paired downsample requires regular convolutions");
  for (std::size_t a = 0; a < 2; ++a) {
    check(spec3d.kernel[a] == spec2d.kernel[a] && spec3d.stride[a] == spec2d.stride[a] &&
              spec3d.padding[a] == spec2d.padding[a],
          ErrorCode::SpecMismatch,
          "voxel and pillar convs must share kernel, stride and padding on X-Y");
  }
  check(spec3d.stride[0] == spec3d.stride[1], ErrorCode::SpecMismatch,
        "BEV stride must be isotropic");
  check(voxels.extents[0] == pillars.extents[0] && voxels.extents[1] == pillars.extents[1],
        ErrorCode::ConsistencyViolation, "voxel and pillar BEV extents differ");
  check(bev_consistent(voxels, pillars), ErrorCode::ConsistencyViolation,
        "voxel BEV occupancy does not match pillar occupancy before downsampling");

  auto v = sparse_conv(voxels, spec3d, w3d);
  auto p = sparse_conv(pillars, spec2d, w2d);
  check(bev_consistent(v, p), ErrorCode::ConsistencyViolation,
        "voxel BEV occupancy does not match pillar occupancy after downsampling");
  return {std::move(v), std::move(p)};
}

void relu_inplace(FeatureMatrix& features) noexcept {
  for (auto& v : features.data()) v = v > 0 ? v : 0;
}

}  // namespace vpf
