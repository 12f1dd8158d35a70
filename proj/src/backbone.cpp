// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/backbone.hpp"

#include <algorithm>
#include <string>

namespace vpf {

namespace {

using Init = ParameterSource::Init;

constexpr int kBlockKernel = 3;

std::string prefix(const char* group, int index, const char* branch) {
  return std::string(group) + "." + std::to_string(index) + "." + branch;
}

ConvWeights take_conv(ParameterSource& src, const std::string& name, int kernel_volume,
                      int in, int out, bool with_bias) {
  ConvWeights w;
  w.kernel_volume = kernel_volume;
  w.in_channels = in;
  w.out_channels = out;
  const std::int64_t fan_in = static_cast<std::int64_t>(kernel_volume) * in;
  w.kernel = src.take(name + ".weight", {kernel_volume, in, out}, Init::HeUniform, fan_in);
  if (with_bias) w.bias = src.take(name + ".bias", {out}, Init::SmallUniform, fan_in);
  return w;
}

BlockWeights take_block(ParameterSource& src, const std::string& name, int kernel_volume,
                        int in, int out, bool downsample, int submanifold_layers) {
  BlockWeights b;
  int channels = in;
  if (downsample) {
    b.down = take_conv(src, name + ".down", kernel_volume, channels, out, /*with_bias=*/true);
    channels = out;
  }
  for (int j = 0; j < submanifold_layers; ++j) {
    b.submanifold.push_back(take_conv(src, name + ".subm" + std::to_string(j), kernel_volume,
                                      channels, out, /*with_bias=*/false));
    channels = out;
  }
  return b;
}

std::vector<DenseLayerWeights> take_dense_block(ParameterSource& src, const std::string& name,
                                                int in, int layers, int channels) {
  std::vector<DenseLayerWeights> block;
  for (int m = 0; m < layers; ++m) {
    const std::string layer = name + "." + std::to_string(m);
    DenseLayerWeights w;
    w.conv = take_conv(src, layer, 9, m == 0 ? in : channels, channels, /*with_bias=*/false);
    w.scale = src.take(layer + ".scale", {channels}, Init::Ones);
    w.shift = src.take(layer + ".shift", {channels}, Init::Zeros);
    block.push_back(std::move(w));
  }
  return block;
}

template <std::size_t Dim>
ConvSpec<Dim> spec_for(const ConvWeights& w, ConvMode mode) {
  if (mode == ConvMode::Regular) {
    return ConvSpec<Dim>::regular(3, 2, 1, w.in_channels, w.out_channels);
  }
  return ConvSpec<Dim>::submanifold(kBlockKernel, w.in_channels, w.out_channels);
}

// Submanifold layers share one kernel map: the coordinate set never changes.
template <std::size_t Dim>
SparseTensor<Dim> run_submanifold(SparseTensor<Dim> x, const BlockWeights& block,
                                  bool activation) {
  if (block.submanifold.empty()) return x;
  const auto first = spec_for<Dim>(block.submanifold.front(), ConvMode::Submanifold);
  const auto map = build_kernel_map<Dim>(x.coords, first, x.extents);
  for (const auto& w : block.submanifold) {
    x = sparse_conv(x, spec_for<Dim>(w, ConvMode::Submanifold), w, map);
    if (activation) relu_inplace(x.features);
  }
  return x;
}

template <std::size_t Dim>
SparseTensor<Dim> run_block(SparseTensor<Dim> x, const BlockWeights& block, bool activation) {
  if (block.down) {
    x = sparse_conv(x, spec_for<Dim>(*block.down, ConvMode::Regular), *block.down);
    if (activation) relu_inplace(x.features);
  }
  return run_submanifold(std::move(x), block, activation);
}

EncoderStep run_paired_block(const EncoderStep& in, const BlockWeights& vb,
                             const BlockWeights& pb, bool activation) {
  EncoderStep out;
  if (vb.down) {
    check(pb.down.has_value(), ErrorCode::ShapeMismatch,
          "voxel and pillar blocks disagree on downsampling");
    auto [v, p] = paired_downsample(in.voxels, in.pillars,
                                    spec_for<3>(*vb.down, ConvMode::Regular),
                                    spec_for<2>(*pb.down, ConvMode::Regular), *vb.down,
                                    *pb.down);
    if (activation) {
      relu_inplace(v.features);
      relu_inplace(p.features);
    }
    out.voxels = std::move(v);
    out.pillars = std::move(p);
  } else {
    out = in;
  }
  out.voxels = run_submanifold(std::move(out.voxels), vb, activation);
  out.pillars = run_submanifold(std::move(out.pillars), pb, activation);
  return out;
}

DenseFeatureMap run_dense_block(DenseFeatureMap x, const std::vector<DenseLayerWeights>& block,
                                int first_stride, bool activation) {
  for (std::size_t m = 0; m < block.size(); ++m) {
    const int stride = m == 0 ? first_stride : 1;
    x = dense_conv2d(x, block[m].conv, 3, stride, 1);
    const auto& scale = block[m].scale;
    const auto& shift = block[m].shift;
    const auto ch = static_cast<std::size_t>(x.channels);
    for (std::size_t k = 0; k < x.values.size(); ++k) {
      Real v = x.values[k] * scale[k % ch] + shift[k % ch];
      x.values[k] = activation && v < 0 ? 0 : v;
    }
  }
  return x;
}

void add_inplace(DenseFeatureMap& acc, const DenseFeatureMap& other) {
  check(acc.rows == other.rows && acc.cols == other.cols && acc.channels == other.channels,
        ErrorCode::ShapeMismatch, "dense maps differ in shape");
  for (std::size_t k = 0; k < acc.values.size(); ++k) acc.values[k] += other.values[k];
}

}  // namespace

const char* to_string(Variant v) noexcept {
  return v == Variant::Dense ? "dense" : "sparse";
}

Variant parse_variant(const std::string& name) {
  if (name == "dense") return Variant::Dense;
  if (name == "sparse") return Variant::Sparse;
  fail(ErrorCode::Config, "unknown variant '" + name + "' (expected dense or sparse)");
}

BackboneConfig BackboneConfig::defaults(Variant variant) {
  BackboneConfig cfg;
  cfg.variant = variant;
  if (variant == Variant::Sparse) cfg.voxel_channels = {16, 32, 64, 128};
  return cfg;
}

void BackboneConfig::validate() const {
  for (int s = 0; s < kEncoderSteps; ++s) {
    check(voxel_channels[s] > 0 && pillar_channels[s] > 0, ErrorCode::Config,
          "encoder channels must be positive");
  }
  check(submanifold_layers >= 1, ErrorCode::Config,
        "at least one submanifold layer per block is required");
  check(sfl_kernel >= 1 && sfl_kernel % 2 == 1, ErrorCode::Config,
        "fusion kernel must be a positive odd integer");
  check(neck_layers >= 1 && neck_channels >= 1, ErrorCode::Config,
        "neck layers and channels must be positive");
  for (int r = 0; r < kReadoutSteps; ++r) {
    check(extra_voxel_channels[r] > 0 && extra_pillar_channels[r] > 0, ErrorCode::Config,
          "readout channels must be positive");
  }
  check(readout_channels > 0, ErrorCode::Config, "readout channels must be positive");
  if (variant == Variant::Sparse) {
    check(pillar_channels[3] == readout_channels &&
              extra_pillar_channels[0] == readout_channels &&
              extra_pillar_channels[1] == readout_channels,
          ErrorCode::Config,
          "sparse readout requires pillar channels at 8x/16x/32x equal to readout_channels");
  }
}

ConvSpec<3> downsample_spec_3d(int in, int out) { return ConvSpec<3>::regular(3, 2, 1, in, out); }
ConvSpec<2> downsample_spec_2d(int in, int out) { return ConvSpec<2>::regular(3, 2, 1, in, out); }

std::vector<Coord3> voxel_extents_per_scale(const GridSpec& grid, const BackboneConfig&) {
  std::vector<Coord3> out{grid.extents()};
  const auto down = downsample_spec_3d(1, 1);
  for (int s = 1; s < kEncoderSteps + kReadoutSteps; ++s) {
    out.push_back(down.output_extents(out.back()));
  }
  return out;
}

ModelWeights make_model_weights(const GridSpec& grid, const BackboneConfig& cfg,
                                ParameterSource& src) {
  cfg.validate();
  ModelWeights w;
  const int dp0 = cfg.pillar_channels[0];
  w.point_encoder.out_channels = static_cast<std::size_t>(dp0);
  w.point_encoder.weight = src.take("point_encoder.weight", {dp0, 4}, Init::HeUniform, 4);
  w.point_encoder.bias = src.take("point_encoder.bias", {dp0}, Init::SmallUniform, 4);

  for (int s = 0; s < kEncoderSteps; ++s) {
    const int vin = s == 0 ? 4 : cfg.voxel_channels[s - 1];
    const int pin = s == 0 ? dp0 : cfg.pillar_channels[s - 1];
    w.voxel_blocks[s] = take_block(src, prefix("encoder", s, "voxel"), 27, vin,
                                   cfg.voxel_channels[s], s > 0, cfg.submanifold_layers);
    w.pillar_blocks[s] = take_block(src, prefix("encoder", s, "pillar"), 9, pin,
                                    cfg.pillar_channels[s], s > 0, cfg.submanifold_layers);
    if (cfg.sfl_steps[s]) {
      const int kv = cfg.sfl_kernel * cfg.sfl_kernel;
      SflWeights sfl;
      sfl.kernel_size = cfg.sfl_kernel;
      sfl.voxel_to_pillar = take_conv(src, prefix("encoder", s, "sfl.v2p"), kv,
                                      cfg.voxel_channels[s], cfg.pillar_channels[s], false);
      sfl.pillar_to_voxel = take_conv(src, prefix("encoder", s, "sfl.p2v"), kv,
                                      cfg.pillar_channels[s], cfg.voxel_channels[s], false);
      w.sfl[s] = std::move(sfl);
    }
  }

  const auto extents = voxel_extents_per_scale(grid, cfg);
  if (cfg.variant == Variant::Dense) {
    const int vin = extents[3][2] * cfg.voxel_channels[3];
    const int pin = cfg.pillar_channels[3];
    const int d = cfg.neck_channels;
    w.neck_voxel.block8 = take_dense_block(src, "neck.voxel.b8", vin, cfg.neck_layers, d);
    w.neck_voxel.block16 = take_dense_block(src, "neck.voxel.b16", d, cfg.neck_layers, d);
    w.neck_pillar.block8 = take_dense_block(src, "neck.pillar.b8", pin, cfg.neck_layers, d);
    w.neck_pillar.block16 = take_dense_block(src, "neck.pillar.b16", d, cfg.neck_layers, d);
  } else {
    std::array<int, kReadoutSteps + 1> dv{cfg.voxel_channels[3], cfg.extra_voxel_channels[0],
                                          cfg.extra_voxel_channels[1]};
    std::array<int, kReadoutSteps + 1> dp{cfg.pillar_channels[3], cfg.extra_pillar_channels[0],
                                          cfg.extra_pillar_channels[1]};
    for (int r = 0; r < kReadoutSteps; ++r) {
      w.readout_voxel_blocks[r] = take_block(src, prefix("readout", r, "voxel"), 27, dv[r],
                                             dv[r + 1], true, cfg.submanifold_layers);
      w.readout_pillar_blocks[r] = take_block(src, prefix("readout", r, "pillar"), 9, dp[r],
                                              dp[r + 1], true, cfg.submanifold_layers);
    }
    for (int k = 0; k <= kReadoutSteps; ++k) {
      const int in = extents[3 + k][2] * dv[k];
      w.readout_voxel_proj[k] = take_conv(src, prefix("readout", k, "voxel_proj"), 1, in,
                                          cfg.readout_channels, false);
    }
  }
  return w;
}

std::vector<EncoderStep> encoder_forward(const SparseTensor3D& voxels,
                                         const SparseTensor2D& pillars,
                                         const BackboneConfig& cfg,
                                         const ModelWeights& weights) {
  check(bev_consistent(voxels, pillars), ErrorCode::ConsistencyViolation,
        "initial voxel and pillar occupancy differ in BEV");
  std::vector<EncoderStep> steps;
  EncoderStep cur{voxels, pillars};
  for (int s = 0; s < kEncoderSteps; ++s) {
    cur = run_paired_block(cur, weights.voxel_blocks[s], weights.pillar_blocks[s],
                           cfg.block_activation);
    if (cfg.sfl_steps[s]) {
      check(weights.sfl[s].has_value(), ErrorCode::ShapeMismatch,
            "fusion enabled at a step without fusion weights");
      const auto corr = build_correspondence(cur.voxels, cur.pillars);
      auto [v, p] = sparse_fusion_layer(cur.voxels, cur.pillars, corr, *weights.sfl[s]);
      cur.voxels = std::move(v);
      cur.pillars = std::move(p);
    }
    steps.push_back(cur);
  }
  return steps;
}

std::vector<EncoderStep> encoder_forward(const PointCloud& cloud, const GridSpec& grid,
                                         const BackboneConfig& cfg,
                                         const ModelWeights& weights) {
  return encoder_forward(build_voxel_features(cloud, grid),
                         build_pillar_features(cloud, grid, weights.point_encoder), cfg,
                         weights);
}

std::vector<SparseTensor3D> voxel_encoder_forward(const SparseTensor3D& voxels,
                                                  const BackboneConfig& cfg,
                                                  const ModelWeights& weights) {
  std::vector<SparseTensor3D> out;
  SparseTensor3D cur = voxels;
  for (int s = 0; s < kEncoderSteps; ++s) {
    cur = run_block(std::move(cur), weights.voxel_blocks[s], cfg.block_activation);
    out.push_back(cur);
  }
  return out;
}

std::vector<SparseTensor2D> pillar_encoder_forward(const SparseTensor2D& pillars,
                                                   const BackboneConfig& cfg,
                                                   const ModelWeights& weights) {
  std::vector<SparseTensor2D> out;
  SparseTensor2D cur = pillars;
  for (int s = 0; s < kEncoderSteps; ++s) {
    cur = run_block(std::move(cur), weights.pillar_blocks[s], cfg.block_activation);
    out.push_back(cur);
  }
  return out;
}

DenseFeatureMap::DenseFeatureMap(int rows_, int cols_, int channels_, int stride_)
    : rows(rows_),
      cols(cols_),
      channels(channels_),
      stride(stride_),
      values(static_cast<std::size_t>(rows_) * cols_ * channels_, 0.0) {}

SparseTensor2D height_compress(const SparseTensor3D& x) {
  const std::size_t d = x.channels();
  const std::size_t h = static_cast<std::size_t>(x.extents[2]);
  SparseTensor2D out;
  out.coords = bev_projection(x.coords);
  out.extents = {x.extents[0], x.extents[1]};
  out.stride = x.stride;
  out.features = FeatureMatrix(out.coords.size(), h * d);
  std::size_t j = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Coord2 bev{x.coords[i][0], x.coords[i][1]};
    while (out.coords[j] != bev) ++j;
    const auto src = x.features.row(i);
    auto dst = out.features.row(j);
    std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(x.coords[i][2] * d));
  }
  return out;
}

DenseFeatureMap densify(const SparseTensor2D& x) {
  DenseFeatureMap map(x.extents[0], x.extents[1], static_cast<int>(x.channels()), x.stride);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto src = x.features.row(i);
    std::copy(src.begin(), src.end(), map.at(x.coords[i][0], x.coords[i][1]));
  }
  return map;
}

DenseFeatureMap densify(const SparseTensor3D& x) { return densify(height_compress(x)); }

SparseTensor2D sparsify(const DenseFeatureMap& map) {
  SparseTensor2D out;
  out.extents = {map.rows, map.cols};
  out.stride = map.stride;
  std::vector<Real> rows;
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      const Real* v = map.at(r, c);
      if (std::all_of(v, v + map.channels, [](Real e) { return e == 0; })) continue;
      out.coords.push_back({r, c});
      rows.insert(rows.end(), v, v + map.channels);
    }
  }
  out.features = FeatureMatrix(out.coords.size(), static_cast<std::size_t>(map.channels));
  out.features.data() = std::move(rows);
  return out;
}

DenseFeatureMap dense_conv2d(const DenseFeatureMap& x, const ConvWeights& w, int kernel,
                             int stride, int padding) {
  check(w.kernel_volume == kernel * kernel && w.in_channels == x.channels,
        ErrorCode::ShapeMismatch, "dense conv weights do not match input");
  const int out_rows = (x.rows + 2 * padding - kernel) / stride + 1;
  const int out_cols = (x.cols + 2 * padding - kernel) / stride + 1;
  check(out_rows > 0 && out_cols > 0, ErrorCode::ShapeMismatch,
        "dense map smaller than the kernel");
  const auto cin = static_cast<std::size_t>(w.in_channels);
  const auto cout = static_cast<std::size_t>(w.out_channels);
  DenseFeatureMap y(out_rows, out_cols, w.out_channels, x.stride * stride);
  for (int r = 0; r < out_rows; ++r) {
    for (int c = 0; c < out_cols; ++c) {
      Real* dst = y.at(r, c);
      if (w.has_bias()) std::copy(w.bias.begin(), w.bias.end(), dst);
      for (int kr = 0; kr < kernel; ++kr) {
        const int ir = r * stride - padding + kr;
        if (ir < 0 || ir >= x.rows) continue;
        for (int kc = 0; kc < kernel; ++kc) {
          const int ic = c * stride - padding + kc;
          if (ic < 0 || ic >= x.cols) continue;
          const Real* src = x.at(ir, ic);
          const Real* wk = &w.kernel[static_cast<std::size_t>(kr * kernel + kc) * cin * cout];
          for (std::size_t i = 0; i < cin; ++i) {
            const Real v = src[i];
            if (v == 0) continue;
            const Real* wr = wk + i * cout;
            for (std::size_t o = 0; o < cout; ++o) dst[o] += v * wr[o];
          }
        }
      }
    }
  }
  return y;
}

DenseFeatureMap dense_fusion_neck(const std::vector<EncoderStep>& steps,
                                  const ModelWeights& weights, const BackboneConfig& cfg) {
  check(steps.size() == kEncoderSteps && steps.back().pillars.stride == 8,
        ErrorCode::ShapeMismatch, "dense fusion neck needs the 8x encoder output");
  check(!weights.neck_voxel.block8.empty() && !weights.neck_pillar.block8.empty(),
        ErrorCode::ShapeMismatch, "model has no neck weights (sparse variant?)");
  const auto& last = steps.back();

  auto v8 = run_dense_block(densify(last.voxels), weights.neck_voxel.block8, 1,
                            cfg.neck_activation);
  auto v16 = run_dense_block(v8, weights.neck_voxel.block16, 2, cfg.neck_activation);
  auto p8 = run_dense_block(densify(last.pillars), weights.neck_pillar.block8, 1,
                            cfg.neck_activation);
  auto p16 = run_dense_block(p8, weights.neck_pillar.block16, 2, cfg.neck_activation);
  add_inplace(v8, p8);
  add_inplace(v16, p16);

  const int d8 = v8.channels;
  const int d16 = v16.channels;
  DenseFeatureMap out(v8.rows, v8.cols, d8 + d16, v8.stride);
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      Real* dst = out.at(r, c);
      std::copy(v8.at(r, c), v8.at(r, c) + d8, dst);
      const Real* up = v16.at(r / 2, c / 2);
      std::copy(up, up + d16, dst + d8);
    }
  }
  return out;
}

SparseTensor2D merge_onto(const SparseTensor2D& acc, const SparseTensor2D& coarse) {
  check(coarse.stride % acc.stride == 0, ErrorCode::ShapeMismatch,
        "coarse stride is not a multiple of the target stride");
  check(acc.channels() == coarse.channels(), ErrorCode::ShapeMismatch,
        "multi-scale features differ in channel count");
  const int ratio = coarse.stride / acc.stride;
  const std::size_t d = acc.channels();

  SparseTensor2D out;
  out.extents = acc.extents;
  out.stride = acc.stride;
  std::vector<Real> rows;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < acc.size() || j < coarse.size()) {
    Coord2 mapped{};
    if (j < coarse.size()) {
      mapped = {coarse.coords[j][0] * ratio, coarse.coords[j][1] * ratio};
      check(in_extents(mapped, acc.extents), ErrorCode::ShapeMismatch,
            "projected coarse site falls outside the target lattice");
    }
    const bool take_acc = i < acc.size() && (j >= coarse.size() || acc.coords[i] <= mapped);
    const bool take_coarse = j < coarse.size() && (i >= acc.size() || mapped <= acc.coords[i]);
    const std::size_t row0 = rows.size();
    rows.resize(row0 + d, 0.0);
    if (take_acc) {
      out.coords.push_back(acc.coords[i]);
      const auto src = acc.features.row(i++);
      for (std::size_t c = 0; c < d; ++c) rows[row0 + c] += src[c];
    }
    if (take_coarse) {
      if (!take_acc) out.coords.push_back(mapped);
      const auto src = coarse.features.row(j++);
      for (std::size_t c = 0; c < d; ++c) rows[row0 + c] += src[c];
    }
  }
  out.features = FeatureMatrix(out.coords.size(), d);
  out.features.data() = std::move(rows);
  return out;
}

SparseTensor2D sparse_readout(const std::vector<EncoderStep>& steps,
                              const ModelWeights& weights, const BackboneConfig& cfg) {
  check(steps.size() == kEncoderSteps && steps.back().pillars.stride == 8,
        ErrorCode::ShapeMismatch, "sparse readout needs the 8x encoder output");
  check(!weights.readout_voxel_blocks[0].submanifold.empty(), ErrorCode::ShapeMismatch,
        "model has no readout weights (dense variant?)");

  std::vector<EncoderStep> scales{steps.back()};
  for (int r = 0; r < kReadoutSteps; ++r) {
    scales.push_back(run_paired_block(scales.back(), weights.readout_voxel_blocks[r],
                                      weights.readout_pillar_blocks[r], cfg.block_activation));
  }

  std::optional<SparseTensor2D> voxel_acc;
  std::optional<SparseTensor2D> pillar_acc;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const auto compressed = height_compress(scales[k].voxels);
    const auto& proj_w = weights.readout_voxel_proj[k];
    const auto projected = sparse_conv(
        compressed, ConvSpec<2>::submanifold(1, proj_w.in_channels, proj_w.out_channels),
        proj_w);
    voxel_acc = voxel_acc ? merge_onto(*voxel_acc, projected) : projected;
    pillar_acc = pillar_acc ? merge_onto(*pillar_acc, scales[k].pillars) : scales[k].pillars;
  }
  check(voxel_acc->coords == pillar_acc->coords, ErrorCode::ConsistencyViolation,
        "voxel and pillar readouts cover different BEV sites");
  SparseTensor2D out = std::move(*pillar_acc);
  auto& dst = out.features.data();
  const auto& src = voxel_acc->features.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = src[k] + dst[k];
  return out;
}

Backbone::Backbone(const GridSpec& grid, const BackboneConfig& cfg, std::uint64_t seed,
                   const WeightStore* manifest)
    : grid_(grid), cfg_(cfg) {
  ParameterSource source(seed, manifest);
  weights_ = make_model_weights(grid_, cfg_, source);
  source.require_manifest_consumed();
  parameters_ = source.recorded();
}

ForwardResult Backbone::forward(const PointCloud& cloud) const {
  ForwardResult result;
  result.steps = encoder_forward(cloud, grid_, cfg_, weights_);
  if (cfg_.variant == Variant::Dense) {
    result.dense = dense_fusion_neck(result.steps, weights_, cfg_);
  } else {
    result.sparse = sparse_readout(result.steps, weights_, cfg_);
  }
  return result;
}

}  // namespace vpf
