// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>

#include "vpf/analysis.hpp"
#include "vpf/backbone.hpp"
#include "vpf/config.hpp"
#include "vpf/fusion.hpp"
#include "vpf/generators.hpp"
#include "vpf/io.hpp"
#include "vpf/losses.hpp"
#include "vpf/oracle.hpp"

namespace vpf::verify {

namespace {

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  const int n = std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return std::string(buf, static_cast<std::size_t>(std::clamp(n, 0, 511)));
}

CriterionResult result(int id, const char* name, bool passed, std::string detail) {
  return {id, name, passed, std::move(detail), 0};
}

bool bitwise_equal(const FeatureMatrix& a, const FeatureMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(Real)) == 0;
}

template <std::size_t Dim>
bool bitwise_equal(const SparseTensor<Dim>& a, const SparseTensor<Dim>& b) {
  return a.coords == b.coords && a.stride == b.stride && a.extents == b.extents &&
         bitwise_equal(a.features, b.features);
}

double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

template <std::size_t Dim>
double conv_case(gen::Rng& rng, bool regular, bool& structure_ok) {
  const int lo = Dim == 3 ? 4 : 8;
  const int hi = Dim == 3 ? 16 : 32;
  Coord<Dim> ext{};
  for (auto& e : ext) e = gen::uniform_int(rng, lo, hi);
  const double density = gen::uniform(rng, 0.05, 0.5);
  const int cin = gen::uniform_int(rng, 1, 4);
  const int cout = gen::uniform_int(rng, 1, 4);
  SparseTensor<Dim> x;
  while (x.size() == 0) x = gen::sparse_tensor<Dim>(rng, ext, density, cin);
  const auto spec = regular ? ConvSpec<Dim>::regular(3, 2, 1, cin, cout)
                            : ConvSpec<Dim>::submanifold(3, cin, cout);
  const auto w = gen::conv_weights(rng, spec.kernel_volume(), cin, cout,
                                   gen::uniform(rng, 0, 1) < 0.5);
  const auto got = sparse_conv(x, spec, w);
  const auto want = oracle::dense_conv(x, spec, w);
  structure_ok = got.coords == want.coords && got.extents == want.extents &&
                 got.stride == want.stride && got.features.rows() == want.features.rows() &&
                 got.features.cols() == want.features.cols();
  if (!structure_ok) return INFINITY;
  double worst = 0;
  for (std::size_t k = 0; k < got.features.data().size(); ++k) {
    worst = std::max(worst, relative_error(got.features.data()[k], want.features.data()[k]));
  }
  return worst;
}

void world_box_point(const Box3D& b, double lx, double ly, double lz, Point& out) {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  out.x = b.center[0] + lx * c - ly * s;
  out.y = b.center[1] + lx * s + ly * c;
  out.z = b.center[2] + lz;
}

}  // namespace

CriterionResult sparse_conv_equivalence(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x01);
  constexpr int kCases = 200;
  double worst = 0;
  int structural = 0;
  for (int t = 0; t < kCases; ++t) {
    bool ok = true;
    double err = 0;
    switch (t % 4) {
      case 0: err = conv_case<3>(rng, false, ok); break;
      case 1: err = conv_case<3>(rng, true, ok); break;
      case 2: err = conv_case<2>(rng, false, ok); break;
      default: err = conv_case<2>(rng, true, ok); break;
    }
    if (!ok) ++structural;
    worst = std::max(worst, err);
  }
  return result(1, "sparse-conv oracle equivalence", structural == 0 && worst <= 1e-5,
                format("%d cases, %d site-set mismatches, max rel err %.3g (tol 1e-5)", kCases,
                       structural, worst));
}

CriterionResult bev_consistency(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x02);
  const auto grid = GridSpec::create({0, 0, -1}, {6.4, 6.4, 2.2}, {0.1, 0.1, 0.2});
  const auto cfg = BackboneConfig::defaults(Variant::Dense);
  ParameterSource source(seed);
  const auto weights = make_model_weights(grid, cfg, source);
  constexpr int kClouds = 100;
  int violations = 0;
  int checked = 0;
  for (int t = 0; t < kClouds; ++t) {
    const auto cloud = gen::cloud(rng, grid, static_cast<std::size_t>(gen::uniform_int(rng, 200, 1500)));
    try {
      const auto steps = encoder_forward(cloud, grid, cfg, weights);
      for (const auto& s : steps) {
        ++checked;
        if (!bev_consistent(s.voxels, s.pillars)) ++violations;
      }
      if (steps.size() != kEncoderSteps) ++violations;
    } catch (const Error&) {
      ++violations;
    }
  }
  return result(2, "BEV consistency", violations == 0,
                format("%d clouds, %d step checks, %d violations", kClouds, checked, violations));
}

CriterionResult sfl_correctness(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x03);
  constexpr int kInstances = 100;
  int row_sum = 0;
  int pool = 0;
  int bcast = 0;
  int round_trip = 0;
  int zero_identity = 0;
  for (int t = 0; t < kInstances; ++t) {
    const Coord3 ext{gen::uniform_int(rng, 4, 12), gen::uniform_int(rng, 4, 12),
                     gen::uniform_int(rng, 2, 8)};
    const double density = gen::uniform(rng, 0.05, 0.5);
    const int cv = gen::uniform_int(rng, 1, 6);
    const int cp = gen::uniform_int(rng, 1, 6);
    std::pair<SparseTensor3D, SparseTensor2D> pair;
    while (pair.first.size() == 0) pair = gen::paired_tensors(rng, ext, density, cv, cp);
    const auto& [voxels, pillars] = pair;

    const auto corr = build_correspondence(voxels, pillars);
    const auto c = oracle::index_matrix(voxels, pillars);
    bool rows_ok = corr.num_voxels() == voxels.size() && corr.num_pillars() == pillars.size();
    for (std::size_t i = 0; rows_ok && i < c.size(); ++i) {
      int sum = 0;
      for (std::size_t j = 0; j < c[i].size(); ++j) sum += c[i][j];
      rows_ok = sum == 1 && c[i][corr.voxel_to_pillar[i]] == 1;
    }
    for (std::size_t j = 0; rows_ok && j < pillars.size(); ++j) {
      std::vector<std::uint32_t> expect;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i][j]) expect.push_back(static_cast<std::uint32_t>(i));
      }
      const auto got = corr.voxels_of(j);
      rows_ok = std::equal(got.begin(), got.end(), expect.begin(), expect.end());
    }
    if (!rows_ok) ++row_sum;

    const auto pooled = sparse_pool(voxels, corr);
    if (pooled.coords != pillars.coords || !bitwise_equal(pooled.features, oracle::group_max(voxels, pillars))) ++pool;
    const auto spread = broadcast(pillars, corr);
    if (spread.coords != voxels.coords ||
        !bitwise_equal(spread.features, oracle::group_broadcast(pillars, voxels))) {
      ++bcast;
    }
    if (!bitwise_equal(sparse_pool(spread, corr).features, pillars.features)) ++round_trip;

    SflWeights zero;
    zero.kernel_size = 3;
    zero.voxel_to_pillar = ConvWeights::zeros(9, cv, cp);
    zero.pillar_to_voxel = ConvWeights::zeros(9, cp, cv);
    const auto [v2, p2] = sparse_fusion_layer(voxels, pillars, corr, zero);
    if (!bitwise_equal(v2, voxels) || !bitwise_equal(p2, pillars)) ++zero_identity;
  }
  const bool ok = row_sum + pool + bcast + round_trip + zero_identity == 0;
  return result(3, "SFL correctness", ok,
                format("%d instances; failures: row-sum %d, pool %d, broadcast %d, "
                       "pool(broadcast) %d, zero-weight identity %d",
                       kInstances, row_sum, pool, bcast, round_trip, zero_identity));
}

double iou_monte_carlo_error(std::size_t trials, std::uint64_t seed, std::size_t samples) {
  gen::Rng rng(seed ^ 0x04);
  double worst = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Box3D a = gen::box(rng, 1.0, 0.5, 4.0, true);
    Box3D b = gen::box(rng, 1.0, 0.5, 4.0, true);
    for (int k = 0; k < 3; ++k) b.center[k] = a.center[k] + gen::uniform(rng, -1, 1);
    const double clipped = iou3d(a, b);
    const double mc = oracle::monte_carlo_iou(a, b, samples, seed + t);
    worst = std::max(worst, std::abs(clipped - mc));
  }
  return worst;
}

CriterionResult rotated_iou(std::uint64_t seed) {
  const double mc_err = iou_monte_carlo_error(50, seed);
  const Box3D unit{{0, 0, 0}, {1, 1, 1}, 0};
  const Box3D far{{100, 0, 0}, {1, 1, 1}, 0};
  const Box3D shifted{{0.5, 0, 0}, {1, 1, 1}, 0};
  const double same = iou3d(unit, unit);
  const double disjoint = iou3d(unit, far);
  const double third = iou3d(unit, shifted);
  const bool exact = std::abs(same - 1) <= 1e-9 && disjoint == 0 && std::abs(third - 1.0 / 3) <= 1e-9;
  return result(4, "rotated 3D IoU", mc_err <= 0.01 && exact,
                format("50 pairs, max |clip - MC(1e6)| %.4g (tol 0.01); identical %.12g, "
                       "disjoint %.12g, offset cube %.12g",
                       mc_err, same, disjoint, third));
}

CriterionResult diou_gradient(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x05);
  constexpr int kConfigs = 20;
  const std::array<int, 6> params{0, 1, 2, 3, 4, 5};
  double worst = 0;
  for (int t = 0; t < kConfigs; ++t) {
    Box3D gt;
    Box3D b;
    bool separated = false;
    while (!separated) {
      gt = gen::box(rng, 1.0, 1.0, 3.0, false);
      b = gt;
      separated = true;
      for (int a = 0; a < 3; ++a) {
        b.center[a] += gen::uniform(rng, -0.3, 0.3) * gt.dims[a];
        b.dims[a] = gt.dims[a] * gen::uniform(rng, 0.7, 1.3);
        const double top = (b.center[a] + b.dims[a] / 2) - (gt.center[a] + gt.dims[a] / 2);
        const double bot = (b.center[a] - b.dims[a] / 2) - (gt.center[a] - gt.dims[a] / 2);
        separated = separated && std::abs(top) > 1e-2 && std::abs(bot) > 1e-2;
      }
    }
    const auto f = [&](const Box3D& x) { return diou_loss(x, gt); };
    const auto g = [&](const Box3D& x) {
      const auto g6 = diou_loss_gradient_axis_aligned(x, gt);
      BoxParams p{};
      std::copy(g6.begin(), g6.end(), p.begin());
      return p;
    };
    worst = std::max(worst, finite_difference_check(f, g, b, 1e-4, params));
  }

  int self_nonzero = 0;
  int out_of_bounds = 0;
  for (int t = 0; t < 1000; ++t) {
    const Box3D a = gen::box(rng, 3.0, 0.2, 4.0, true);
    const Box3D b = gen::box(rng, 3.0, 0.2, 4.0, true);
    if (diou_loss(a, a) != 0) ++self_nonzero;
    const double l = diou_loss(a, b);
    if (!(l >= 0 && l < 2)) ++out_of_bounds;
  }
  const bool ok = worst <= 1e-4 && self_nonzero == 0 && out_of_bounds == 0;
  return result(5, "DIoU gradient", ok,
                format("%d configs, max FD rel err %.3g (tol 1e-4); diou(b,b) != 0: %d; "
                       "diou outside [0,2): %d of 1000",
                       kConfigs, worst, self_nonzero, out_of_bounds));
}

CriterionResult rectification_identities(std::uint64_t) {
  constexpr int kGrid = 50;
  auto v = [](int i) { return static_cast<double>(i) / (kGrid - 1); };
  int passthrough = 0;
  int monotone = 0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      if (rectify_score(v(i), v(j), 0) != v(i)) ++passthrough;
      if (rectify_score(v(i), v(j), 1) != v(j)) ++passthrough;
    }
  }
  for (double alpha : {0.5, 0.65, 0.68, 0.71}) {
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        const double here = rectify_score(v(i), v(j), alpha);
        if (i + 1 < kGrid && rectify_score(v(i + 1), v(j), alpha) < here) ++monotone;
        if (j + 1 < kGrid && rectify_score(v(i), v(j + 1), alpha) < here) ++monotone;
      }
    }
  }
  return result(6, "score rectification identities", passthrough == 0 && monotone == 0,
                format("alpha 0/1 passthrough failures %d; monotonicity violations %d on 50x50 "
                       "grid for alpha in {0.5, 0.65, 0.68, 0.71}",
                       passthrough, monotone));
}

CriterionResult loss_recomposition(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x07);
  double worst = 0;
  double worst_gamma0 = 0;
  for (int t = 0; t < 100; ++t) {
    const int n_cls = gen::uniform_int(rng, 1, 40);
    const int n_pos = gen::uniform_int(rng, 0, 20);
    std::vector<ClassificationTerm> cls;
    for (int k = 0; k < n_cls; ++k) {
      cls.push_back({gen::uniform(rng, 0.001, 0.999), gen::uniform(rng, 0, 1) < 0.3});
    }
    std::vector<IouTerm> iou;
    std::vector<RegressionTerm> reg;
    std::vector<DiouTerm> diou;
    for (int k = 0; k < n_pos; ++k) {
      iou.push_back({gen::uniform(rng, -1, 1), gen::uniform(rng, 0, 1)});
      RegressionTerm r;
      for (int d = 0; d < kBoxParams; ++d) {
        r.predicted.push_back(gen::uniform(rng, -2, 2));
        r.target.push_back(gen::uniform(rng, -2, 2));
      }
      reg.push_back(std::move(r));
      const Box3D gt = gen::box(rng, 2.0, 0.5, 3.0, true);
      Box3D b = gt;
      for (auto& c : b.center) c += gen::uniform(rng, -0.5, 0.5);
      b.heading = canonical_heading(b.heading + gen::uniform(rng, -0.3, 0.3));
      diou.push_back({b, gt});
    }
    LossWeights w;
    w.gamma = gen::uniform(rng, 0, 2);
    w.focal_alpha = gen::uniform(rng, 0, 1);
    w.focal_gamma = gen::uniform(rng, 0, 3);
    if (t % 2 == 1) {
      for (int d = 0; d < kBoxParams; ++d) w.reg_mask.push_back(gen::uniform(rng, 0, 1) < 0.6);
    }
    const auto got = overall_loss(cls, iou, reg, diou, w);
    worst = std::max(worst, std::abs(got.total - oracle::overall_loss(cls, iou, reg, diou, w)));
    w.gamma = 0;
    const auto g0 = overall_loss(cls, iou, reg, diou, w);
    worst_gamma0 = std::max(worst_gamma0, std::abs(g0.total - (g0.cls + g0.iou)));
  }
  const double e75 = encode_iou_target(0.75);
  const double e25 = encode_iou_target(0.25);
  const double e0 = encode_iou_target(0.0);
  const bool encoded = e75 == 1.0 && e25 == 0.0 && e0 == -0.5;
  const bool ok = worst <= 1e-6 && worst_gamma0 <= 1e-6 && encoded;
  return result(7, "loss recomposition", ok,
                format("100 batches, max |L - oracle| %.3g, gamma=0 identity err %.3g (tol 1e-6); "
                       "encode(0.75, 0.25, 0) = (%g, %g, %g)",
                       worst, worst_gamma0, e75, e25, e0));
}

CriterionResult vertical_density(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x08);
  int wrong_sz = 0;
  int synthetic = 0;
  for (int k = 0; k <= kDensityBins; ++k) {
    for (int trial = 0; trial < 20; ++trial) {
      const Box3D box = gen::box(rng, 5.0, 0.5, 3.0, true);
      std::array<int, kDensityBins> order{};
      for (int b = 0; b < kDensityBins; ++b) order[b] = b;
      std::shuffle(order.begin(), order.end(), rng);
      PointCloud cloud;
      for (int n = 0; n < k; ++n) {
        const int bin = order[n];
        const int reps = gen::uniform_int(rng, 1, 5);
        for (int r = 0; r < reps; ++r) {
          const double lz = box.dims[2] * ((bin + 0.5 + gen::uniform(rng, -0.3, 0.3)) / kDensityBins - 0.5);
          Point p;
          world_box_point(box, gen::uniform(rng, -0.45, 0.45) * box.dims[0],
                          gen::uniform(rng, -0.45, 0.45) * box.dims[1], lz, p);
          cloud.points.push_back(p);
        }
      }
      for (int n = 0; n < 5; ++n) {
        Point p;
        world_box_point(box, box.dims[0] * gen::uniform(rng, 0.6, 2.0), 0, 0, p);
        cloud.points.push_back(p);
      }
      ++synthetic;
      if (vpf::vertical_density(cloud, box).s_z != static_cast<double>(k) / kDensityBins) ++wrong_sz;
    }
  }
  int mismatched = 0;
  constexpr int kRandom = 100;
  for (int t = 0; t < kRandom; ++t) {
    const Box3D box = gen::box(rng, 5.0, 0.5, 3.0, true);
    PointCloud cloud;
    const int n = gen::uniform_int(rng, 0, 60);
    const double reach = std::hypot(box.dims[0], box.dims[1]) * 0.6;
    for (int i = 0; i < n; ++i) {
      cloud.points.push_back({box.center[0] + gen::uniform(rng, -reach, reach),
                              box.center[1] + gen::uniform(rng, -reach, reach),
                              box.center[2] + gen::uniform(rng, -0.6, 0.6) * box.dims[2], 0});
    }
    const auto rec = vpf::vertical_density(cloud, box);
    const auto want = oracle::density_bins(cloud, box);
    bool same = rec.point_count == want.inside;
    int occupied = 0;
    for (int b = 0; b < kDensityBins; ++b) {
      same = same && rec.z_bins[b] == (want.z[b] > 0);
      occupied += want.z[b] > 0;
    }
    same = same && rec.s_z == static_cast<double>(occupied) / kDensityBins;
    if (!same) ++mismatched;
  }
  return result(8, "vertical density", wrong_sz == 0 && mismatched == 0,
                format("%d synthetic boxes (k = 0..10): %d wrong S_Z; %d rotated boxes: %d "
                       "oracle mismatches",
                       synthetic, wrong_sz, kRandom, mismatched));
}

CriterionResult determinism(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x09);
  const auto grid = RunConfig::default_grid();
  int differing = 0;
  std::size_t bytes = 0;
  for (Variant v : {Variant::Dense, Variant::Sparse}) {
    const auto cfg = BackboneConfig::defaults(v);
    const auto cloud = gen::cloud(rng, grid, 3000);
    const Backbone first(grid, cfg, seed);
    const Backbone second(grid, cfg, seed);
    const auto a = encode_dump(forward_records(first.forward(cloud), true));
    const auto b = encode_dump(forward_records(second.forward(cloud), true));
    if (a != b) ++differing;
    bytes += a.size();
  }

  const auto small = GridSpec::create({0, 0, -1}, {6.4, 6.4, 2.2}, {0.1, 0.1, 0.2});
  auto cfg = BackboneConfig::defaults(Variant::Dense);
  cfg.sfl_steps.fill(false);
  ParameterSource source(seed);
  const auto w = make_model_weights(small, cfg, source);
  int leaks = 0;
  constexpr int kClouds = 10;
  for (int t = 0; t < kClouds; ++t) {
    const auto cloud = gen::cloud(rng, small, 1000);
    const auto v0 = build_voxel_features(cloud, small);
    const auto p0 = build_pillar_features(cloud, small, w.point_encoder);
    auto v1 = v0;
    auto p1 = p0;
    for (auto& x : v1.features.data()) x += gen::uniform(rng, -1, 1);
    for (auto& x : p1.features.data()) x += gen::uniform(rng, -1, 1);
    const auto base = encoder_forward(v0, p0, cfg, w);
    const auto pillar_moved = encoder_forward(v0, p1, cfg, w);
    const auto voxel_moved = encoder_forward(v1, p0, cfg, w);
    for (std::size_t s = 0; s < base.size(); ++s) {
      if (!bitwise_equal(base[s].voxels, pillar_moved[s].voxels)) ++leaks;
      if (!bitwise_equal(base[s].pillars, voxel_moved[s].pillars)) ++leaks;
    }
  }
  return result(9, "determinism and branch isolation", differing == 0 && leaks == 0,
                format("dense+sparse dumps (%zu bytes): %d differing; SFL-free perturbation "
                       "over %d clouds: %d cross-branch changes",
                       bytes, differing, kClouds, leaks));
}

CriterionResult configuration_fidelity(std::uint64_t seed) {
  gen::Rng rng(seed ^ 0x0a);
  const RunConfig cfg;
  const auto cloud = gen::cloud(rng, cfg.grid, 4000);
  const Backbone model(cfg.grid, cfg.backbone, cfg.seed);
  const auto records = decode_dump(encode_dump(forward_records(model.forward(cloud), true)));
  constexpr std::array<std::size_t, 4> kVoxel{16, 32, 64, 64};
  constexpr std::array<std::size_t, 4> kPillar{32, 64, 128, 256};
  constexpr std::array<int, 4> kStride{1, 2, 4, 8};
  std::string seen;
  int wrong = 0;
  for (int s = 0; s < kEncoderSteps; ++s) {
    const std::string prefix = "encoder." + std::to_string(s);
    for (const auto& r : records) {
      if (r.name == prefix + ".voxels") {
        wrong += r.channels != kVoxel[s] || r.stride != kStride[s];
        seen += format("%s%zu", s ? "," : "voxels [", r.channels);
      }
    }
  }
  seen += "] pillars [";
  for (int s = 0; s < kEncoderSteps; ++s) {
    const std::string prefix = "encoder." + std::to_string(s);
    for (const auto& r : records) {
      if (r.name == prefix + ".pillars") {
        wrong += r.channels != kPillar[s] || r.stride != kStride[s];
        seen += format("%s%zu@%d", s ? "," : "", r.channels, r.stride);
      }
    }
  }
  seen += "]";
  const bool complete = records.size() == 2 * kEncoderSteps + 1;
  return result(10, "configuration fidelity", wrong == 0 && complete,
                format("%s; %zu records, %d header mismatches", seen.c_str(), records.size(), wrong));
}

std::vector<CriterionResult> run_all(std::uint64_t seed,
                                     const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = CriterionResult (*)(std::uint64_t);
  constexpr std::array<Fn, 10> kChecks{
      sparse_conv_equivalence, bev_consistency,   sfl_correctness, rotated_iou,
      diou_gradient,           rectification_identities, loss_recomposition,
      vertical_density,        determinism,       configuration_fidelity};
  constexpr std::array<const char*, 10> kNames{
      "sparse-conv oracle equivalence", "BEV consistency", "SFL correctness", "rotated 3D IoU",
      "DIoU gradient", "score rectification identities", "loss recomposition",
      "vertical density", "determinism and branch isolation", "configuration fidelity"};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < kChecks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = kChecks[i](seed);
    } catch (const std::exception& e) {
      r = result(static_cast<int>(i + 1), kNames[i], false, std::string("threw: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vpf::verify
