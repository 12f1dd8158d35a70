// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "helpers.hpp"
#include "vpf/backbone.hpp"
#include "vpf/conv.hpp"
#include "vpf/generators.hpp"
#include "vpf/oracle.hpp"

using namespace vpf;

TEST_CASE("submanifold convolution keeps the input sites") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = gen::sparse_tensor<3>(rng, {8, 8, 6}, 0.2, 3);
    if (x.size() == 0) continue;
    const auto spec = ConvSpec<3>::submanifold(3, 3, 2);
    const auto y = sparse_conv(x, spec, gen::conv_weights(rng, 27, 3, 2, true));
    CHECK(y.coords == x.coords);
    CHECK(y.extents == x.extents);
    CHECK(y.stride == x.stride);
    CHECK(y.channels() == 2);
  }
}

TEST_CASE("an isolated site sees only the centre tap") {
  SparseTensor2D x;
  x.extents = {5, 5};
  x.coords = {{2, 2}};
  x.features = FeatureMatrix(1, 1, 3.0);
  auto w = ConvWeights::zeros(9, 1, 1);
  for (int k = 0; k < 9; ++k) w.at(k, 0, 0) = k + 1;
  const auto y = sparse_conv(x, ConvSpec<2>::submanifold(3, 1, 1), w);
  REQUIRE(y.size() == 1);
  CHECK(y.features(0, 0) == 15.0);  // centre offset index 4 carries weight 5
}

TEST_CASE("regular convolution output extents follow the strided formula") {
  const auto spec = ConvSpec<3>::regular(3, 2, 1, 1, 1);
  CHECK(spec.output_extents({128, 128, 40}) == Coord3{64, 64, 20});
  CHECK(spec.output_extents({7, 5, 1}) == Coord3{4, 3, 1});
  CHECK(ConvSpec<2>::regular(2, 2, 0, 1, 1).output_extents({7, 6}) == Coord2{3, 3});
}

TEST_CASE("sparse convolution matches the densify-convolve-mask oracle") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const bool regular = trial % 2 == 1;
    const int cin = gen::uniform_int(rng, 1, 3);
    const int cout = gen::uniform_int(rng, 1, 3);
    if (trial % 4 < 2) {
      const auto x = gen::sparse_tensor<3>(rng, {gen::uniform_int(rng, 3, 10), gen::uniform_int(rng, 3, 10), gen::uniform_int(rng, 2, 6)}, 0.3, cin);
      if (x.size() == 0) continue;
      const auto spec = regular ? ConvSpec<3>::regular(3, 2, 1, cin, cout) : ConvSpec<3>::submanifold(3, cin, cout);
      const auto w = gen::conv_weights(rng, 27, cin, cout, true);
      const auto got = sparse_conv(x, spec, w);
      const auto want = oracle::dense_conv(x, spec, w);
      REQUIRE(got.coords == want.coords);
      CHECK(got.stride == want.stride);
      CHECK(testing::max_rel_error(got.features.data(), want.features.data()) <= 1e-12);
    } else {
      const auto x = gen::sparse_tensor<2>(rng, {gen::uniform_int(rng, 4, 20), gen::uniform_int(rng, 4, 20)}, 0.3, cin);
      if (x.size() == 0) continue;
      const int k = regular ? 3 : 5;
      const auto spec = regular ? ConvSpec<2>::regular(k, 2, 1, cin, cout) : ConvSpec<2>::submanifold(k, cin, cout);
      const auto w = gen::conv_weights(rng, k * k, cin, cout, false);
      const auto got = sparse_conv(x, spec, w);
      const auto want = oracle::dense_conv(x, spec, w);
      REQUIRE(got.coords == want.coords);
      CHECK(testing::max_rel_error(got.features.data(), want.features.data()) <= 1e-12);
    }
  }
}

TEST_CASE("kernel maps are sorted and reproducible") {
  gen::Rng rng(23);
  const auto x = gen::sparse_tensor<3>(rng, {10, 10, 6}, 0.3, 1);
  for (const auto& spec : {ConvSpec<3>::submanifold(3, 1, 1), ConvSpec<3>::regular(3, 2, 1, 1, 1)}) {
    const auto a = build_kernel_map<3>(x.coords, spec, x.extents);
    const auto b = build_kernel_map<3>(x.coords, spec, x.extents);
    CHECK(a.entries == b.entries);
    CHECK(std::is_sorted(a.output_coords.begin(), a.output_coords.end()));
    CHECK(std::adjacent_find(a.output_coords.begin(), a.output_coords.end()) == a.output_coords.end());
    for (const auto& e : a.entries) {
      CHECK(e.input < x.size());
      CHECK(e.output < a.output_coords.size());
      CHECK(e.offset < 27u);
    }
  }
}

TEST_CASE("convolution rejects mismatched weights and specs") {
  gen::Rng rng(24);
  const auto x = gen::sparse_tensor<2>(rng, {6, 6}, 0.5, 2);
  const auto spec = ConvSpec<2>::submanifold(3, 2, 4);
  CHECK_THROWS_AS(sparse_conv(x, spec, ConvWeights::zeros(9, 3, 4)), Error);
  CHECK_THROWS_AS(sparse_conv(x, ConvSpec<2>::submanifold(3, 3, 4), ConvWeights::zeros(9, 3, 4)), Error);
  auto bad = spec;
  bad.padding = {0, 0};
  CHECK_THROWS_AS(build_kernel_map<2>(x.coords, bad, x.extents), Error);
  auto zero_stride = ConvSpec<2>::regular(3, 2, 1, 2, 4);
  zero_stride.stride = {0, 2};
  CHECK_THROWS_AS(zero_stride.validate(), Error);
}

TEST_CASE("paired downsampling keeps BEV consistency and demands matching geometry") {
  gen::Rng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    auto [v, p] = gen::paired_tensors(rng, {12, 10, 6}, 0.15, 2, 3);
    if (v.size() == 0) continue;
    const auto s3 = downsample_spec_3d(2, 4);
    const auto s2 = downsample_spec_2d(3, 5);
    const auto [v2, p2] = paired_downsample(v, p, s3, s2, gen::conv_weights(rng, 27, 2, 4, false),
                                            gen::conv_weights(rng, 9, 3, 5, false));
    CHECK(bev_consistent(v2, p2));
    CHECK(v2.stride == 2);
    CHECK(p2.stride == 2);
  }
  auto [v, p] = gen::paired_tensors(rng, {8, 8, 4}, 0.3, 1, 1);
  auto wide = ConvSpec<2>::regular(5, 2, 2, 1, 1);
  try {
    paired_downsample(v, p, downsample_spec_3d(1, 1), wide, ConvWeights::zeros(27, 1, 1),
                      ConvWeights::zeros(25, 1, 1));
    FAIL("expected SpecMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpecMismatch);
  }
  p.coords.pop_back();
  p.features = FeatureMatrix(p.coords.size(), 1);
  try {
    paired_downsample(v, p, downsample_spec_3d(1, 1), downsample_spec_2d(1, 1),
                      ConvWeights::zeros(27, 1, 1), ConvWeights::zeros(9, 1, 1));
    FAIL("expected ConsistencyViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConsistencyViolation);
  }
}

TEST_CASE("relu clamps negatives only") {
  FeatureMatrix m(1, 4);
  m.data() = {-1.0, 0.0, 2.5, -0.0};
  relu_inplace(m);
  CHECK(m.data() == std::vector<Real>{0.0, 0.0, 2.5, 0.0});
}
