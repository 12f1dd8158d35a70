// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "helpers.hpp"
#include "vpf/backbone.hpp"
#include "vpf/generators.hpp"
#include "vpf/oracle.hpp"
#include "vpf/weights.hpp"

using namespace vpf;

namespace {

GridSpec test_grid() { return GridSpec::create({0, 0, -1}, {6.4, 6.4, 2.2}, {0.1, 0.1, 0.2}); }

}  // namespace

TEST_CASE("default channel presets") {
  const auto dense = BackboneConfig::defaults(Variant::Dense);
  CHECK(dense.voxel_channels == std::array<int, 4>{16, 32, 64, 64});
  CHECK(dense.pillar_channels == std::array<int, 4>{32, 64, 128, 256});
  CHECK(dense.neck_layers == 5);
  CHECK(dense.neck_channels == 128);
  const auto sparse = BackboneConfig::defaults(Variant::Sparse);
  CHECK(sparse.variant == Variant::Sparse);
  CHECK_NOTHROW(sparse.validate());
  CHECK(parse_variant("sparse") == Variant::Sparse);
  CHECK_THROWS_AS(parse_variant("lite"), Error);
}

TEST_CASE("config validation rejects bad channel counts") {
  auto cfg = BackboneConfig::defaults(Variant::Dense);
  cfg.voxel_channels[1] = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = BackboneConfig::defaults(Variant::Sparse);
  cfg.pillar_channels[3] = 64;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("voxel extents halve per scale with kernel 3, stride 2, padding 1") {
  const auto e = voxel_extents_per_scale(test_grid(), BackboneConfig::defaults(Variant::Dense));
  REQUIRE(e.size() == 6);
  CHECK(e[0] == Coord3{64, 64, 16});
  CHECK(e[1] == Coord3{32, 32, 8});
  CHECK(e[3] == Coord3{8, 8, 2});
  CHECK(e[5] == Coord3{2, 2, 1});
}

TEST_CASE("height compression matches the dense reshape oracle") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = gen::sparse_tensor<3>(rng, {gen::uniform_int(rng, 2, 8), gen::uniform_int(rng, 2, 8), gen::uniform_int(rng, 1, 5)}, 0.3, gen::uniform_int(rng, 1, 4));
    const auto got = height_compress(x);
    const auto want = oracle::height_compress(x);
    CHECK(got.coords == want.coords);
    CHECK(testing::bitwise_equal(got.features, want.features));
    CHECK(got.channels() == static_cast<std::size_t>(x.extents[2]) * x.channels());
  }
}

TEST_CASE("multi-scale merge matches dense accumulation") {
  gen::Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const int ratio = trial % 2 == 0 ? 2 : 4;
    auto fine = gen::sparse_tensor<2>(rng, {16, 16}, 0.2, 3, 8);
    auto coarse = gen::sparse_tensor<2>(rng, {16 / ratio, 16 / ratio}, 0.4, 3, 8 * ratio);
    const auto merged = merge_onto(fine, coarse);
    validate(merged);
    const auto want = oracle::merge(fine, coarse);
    const auto got = densify(merged);
    CHECK(testing::max_rel_error(got.values, want.values) <= 1e-15);
    CHECK(merged.size() >= fine.size());
  }
  auto a = gen::sparse_tensor<2>(rng, {8, 8}, 0.5, 2, 4);
  auto b = gen::sparse_tensor<2>(rng, {4, 4}, 0.5, 3, 8);
  CHECK_THROWS_AS(merge_onto(a, b), Error);
}

TEST_CASE("densify and sparsify invert each other") {
  gen::Rng rng(43);
  const auto x = gen::sparse_tensor<2>(rng, {9, 7}, 0.4, 3, 2);
  const auto back = sparsify(densify(x));
  CHECK(back.coords == x.coords);
  CHECK(back.stride == x.stride);
  CHECK(testing::bitwise_equal(back.features, x.features));
}

TEST_CASE("dense conv2d equals a fully occupied sparse convolution") {
  gen::Rng rng(44);
  for (int stride : {1, 2}) {
    SparseTensor2D full;
    full.extents = {9, 6};
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 6; ++c) full.coords.push_back({r, c});
    }
    full.features = FeatureMatrix(full.coords.size(), 3);
    for (auto& v : full.features.data()) v = gen::uniform(rng, -1, 1);
    const auto w = gen::conv_weights(rng, 9, 3, 4, false);
    const auto spec = stride == 1 ? ConvSpec<2>::submanifold(3, 3, 4) : ConvSpec<2>::regular(3, 2, 1, 3, 4);
    const auto want = densify(oracle::dense_conv(full, spec, w));
    const auto got = dense_conv2d(densify(full), w, 3, stride, 1);
    CHECK(got.rows == want.rows);
    CHECK(got.cols == want.cols);
    CHECK(testing::max_rel_error(got.values, want.values) <= 1e-12);
  }
}

TEST_CASE("dense variant produces a 2D-channel map at 8x stride") {
  gen::Rng rng(45);
  const auto grid = test_grid();
  const Backbone model(grid, BackboneConfig::defaults(Variant::Dense), 7);
  const auto r = model.forward(gen::cloud(rng, grid, 1500));
  REQUIRE(r.dense.has_value());
  CHECK_FALSE(r.sparse.has_value());
  CHECK(r.dense->stride == 8);
  CHECK(r.dense->rows == 8);
  CHECK(r.dense->cols == 8);
  CHECK(r.dense->channels == 256);
  REQUIRE(r.steps.size() == 4);
  for (int s = 0; s < 4; ++s) {
    CHECK(r.steps[s].voxels.stride == (1 << s));
    CHECK(bev_consistent(r.steps[s].voxels, r.steps[s].pillars));
  }
}

TEST_CASE("sparse variant produces a readout on the 8x lattice") {
  gen::Rng rng(46);
  const auto grid = test_grid();
  const Backbone model(grid, BackboneConfig::defaults(Variant::Sparse), 7);
  const auto r = model.forward(gen::cloud(rng, grid, 1500));
  REQUIRE(r.sparse.has_value());
  validate(*r.sparse);
  CHECK(r.sparse->stride == 8);
  CHECK(r.sparse->channels() == 256);
  const auto& p8 = r.steps.back().pillars.coords;
  for (const auto& c : p8) CHECK(std::binary_search(r.sparse->coords.begin(), r.sparse->coords.end(), c));
}

TEST_CASE("weight manifests reproduce the seeded model exactly") {
  gen::Rng rng(47);
  const auto grid = test_grid();
  const auto cfg = BackboneConfig::defaults(Variant::Sparse);
  const Backbone seeded(grid, cfg, 99);
  const auto store = WeightStore::from_json(seeded.parameters().to_json());
  const Backbone loaded(grid, cfg, 12345, &store);
  const auto cloud = gen::cloud(rng, grid, 800);
  const auto a = seeded.forward(cloud);
  const auto b = loaded.forward(cloud);
  CHECK(a.sparse->coords == b.sparse->coords);
  CHECK(testing::bitwise_equal(a.sparse->features, b.sparse->features));

  WeightStore missing;
  for (const auto& [name, t] : store.tensors()) {
    if (name != "point_encoder.bias") missing.set(name, t);
  }
  CHECK_THROWS_AS(Backbone(grid, cfg, 0, &missing), Error);
  WeightStore extra = store;
  extra.set("unused.tensor", {{1}, {0.0}});
  CHECK_THROWS_AS(Backbone(grid, cfg, 0, &extra), Error);
}

TEST_CASE("seeds change the weights and nothing else does") {
  const auto grid = test_grid();
  const auto cfg = BackboneConfig::defaults(Variant::Dense);
  const Backbone a(grid, cfg, 1);
  const Backbone b(grid, cfg, 1);
  const Backbone c(grid, cfg, 2);
  CHECK(a.parameters().tensors() == b.parameters().tensors());
  CHECK_FALSE(a.parameters().tensors() == c.parameters().tensors());
}

TEST_CASE("without fusion layers the branches are isolated") {
  gen::Rng rng(48);
  const auto grid = test_grid();
  auto cfg = BackboneConfig::defaults(Variant::Dense);
  cfg.sfl_steps.fill(false);
  ParameterSource source(3);
  const auto w = make_model_weights(grid, cfg, source);
  const auto cloud = gen::cloud(rng, grid, 600);
  const auto v0 = build_voxel_features(cloud, grid);
  auto p0 = build_pillar_features(cloud, grid, w.point_encoder);
  const auto base = encoder_forward(v0, p0, cfg, w);
  for (auto& x : p0.features.data()) x = -x + 0.5;
  const auto moved = encoder_forward(v0, p0, cfg, w);
  const auto alone = voxel_encoder_forward(v0, cfg, w);
  for (int s = 0; s < 4; ++s) {
    CHECK(testing::bitwise_equal(base[s].voxels.features, moved[s].voxels.features));
    CHECK(testing::bitwise_equal(base[s].voxels.features, alone[s].features));
  }
}
