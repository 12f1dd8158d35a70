// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "vpf/analysis.hpp"
#include "vpf/generators.hpp"
#include "vpf/oracle.hpp"

using namespace vpf;

namespace {

Point world(const Box3D& b, double lx, double ly, double lz) {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  return {b.center[0] + lx * c - ly * s, b.center[1] + lx * s + ly * c, b.center[2] + lz, 0};
}

}  // namespace

TEST_CASE("ten points at the bin centres give S_Z = 1") {
  const Box3D box{{1, 2, 0.5}, {4, 2, 1.5}, 0.7};
  PointCloud cloud;
  for (int k = 0; k < 10; ++k) cloud.points.push_back(world(box, 0, 0, box.dims[2] * ((k + 0.5) / 10 - 0.5)));
  const auto rec = vertical_density(cloud, box, 3);
  CHECK(rec.box_id == 3);
  CHECK(rec.s_z == 1.0);
  CHECK(rec.point_count == 10);
  CHECK(rec.horizontal_occupancy == doctest::Approx(0.1));
}

TEST_CASE("points in the bottom half occupy at most five bins") {
  gen::Rng rng(81);
  const Box3D box{{0, 0, 0}, {2, 2, 2}, 0.3};
  PointCloud cloud;
  for (int i = 0; i < 200; ++i) {
    cloud.points.push_back(world(box, gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, -1e-9)));
  }
  CHECK(vertical_density(cloud, box).s_z <= 0.5);
}

TEST_CASE("top-face points land in the top bin and faces count as inside") {
  const Box3D box{{0, 0, 0}, {2, 2, 2}, 0};
  const auto rec = vertical_density(PointCloud{{{1, 1, 1, 0}, {-1, -1, -1, 0}}}, box);
  CHECK(rec.point_count == 2);
  CHECK(rec.z_bins[9]);
  CHECK(rec.z_bins[0]);
  CHECK(rec.s_z == 0.2);
}

TEST_CASE("density binning matches the per-point oracle") {
  gen::Rng rng(82);
  std::set<double> seen;
  for (int t = 0; t < 200; ++t) {
    const Box3D box = gen::box(rng, 5, 0.3, 3, true);
    PointCloud cloud;
    for (int i = gen::uniform_int(rng, 0, 40); i > 0; --i) {
      cloud.points.push_back(world(box, gen::uniform(rng, -0.6, 0.6) * box.dims[0],
                                   gen::uniform(rng, -0.6, 0.6) * box.dims[1],
                                   gen::uniform(rng, -0.6, 0.6) * box.dims[2]));
    }
    const auto rec = vertical_density(cloud, box);
    const auto want = oracle::density_bins(cloud, box);
    CHECK(rec.point_count == want.inside);
    for (int k = 0; k < kDensityBins; ++k) CHECK(rec.z_bins[k] == (want.z[k] > 0));
    CHECK(std::abs(rec.s_z * 10 - std::round(rec.s_z * 10)) == 0);
    if (rec.point_count > 0) CHECK(rec.s_z >= 0.1);
    seen.insert(rec.s_z);
  }
  for (double s : seen) CHECK(std::round(s * 10) / 10 == s);
}

TEST_CASE("density rejects degenerate boxes") {
  CHECK_THROWS_AS(vertical_density(PointCloud{}, {{0, 0, 0}, {1, 1, 0}, 0}), Error);
}

TEST_CASE("recall examples") {
  std::vector<LabeledBox> gts{{{{0, 0, 0}, {4, 2, 1.5}, 0}, "Vehicle", 0.3},
                              {{{10, 0, 0}, {1, 1, 1.8}, 0}, "Pedestrian", 0.3},
                              {{{20, 0, 0}, {2, 1, 1.7}, 0}, "Cyclist", 0.8}};
  RecallOptions opts;
  opts.thresholds = {{"Vehicle", 0.8}, {"Pedestrian", 0.55}, {"Cyclist", 0.55}};
  const auto exact = recall_by_density(gts, gts, opts);
  REQUIRE(exact.size() == 2);
  CHECK(exact[0].s_z == 0.3);
  CHECK(exact[0].total == 2);
  for (const auto& r : exact) CHECK(r.recall() == 1.0);
  for (const auto& r : recall_by_density(gts, {}, opts)) CHECK(r.recall() == 0.0);

  auto wrong_class = gts;
  for (auto& b : wrong_class) b.cls = "Other";
  for (const auto& r : recall_by_density(gts, wrong_class, opts)) CHECK(r.recall() == 0.0);

  CHECK(recall_csv(exact) == "s_z,total,recalled,recall\n0.3,2,2,1.000000\n0.8,1,1,1.000000\n");
  RecallOptions missing;
  CHECK_THROWS_AS(greedy_match(gts, gts, missing), Error);
  RecallOptions out_of_range;
  out_of_range.uniform = 1.0;
  CHECK_THROWS_AS(greedy_match(gts, gts, out_of_range), Error);
}

TEST_CASE("greedy matching versus the exhaustive optimum") {
  gen::Rng rng(83);
  RecallOptions opts;
  opts.uniform = 0.3;
  for (int t = 0; t < 200; ++t) {
    const bool separated = t % 2 == 0;
    const int n = gen::uniform_int(rng, 1, 10);
    std::vector<LabeledBox> gts;
    std::vector<LabeledBox> preds;
    for (int i = 0; i < n; ++i) {
      Box3D b = gen::box(rng, separated ? 0 : 1.5, 0.8, 2, true);
      if (separated) b.center[0] = 10.0 * i;
      gts.push_back({b, "A", 0});
    }
    const int m = gen::uniform_int(rng, 0, 10);
    for (int k = 0; k < m; ++k) {
      Box3D b = gts[gen::uniform_int(rng, 0, n - 1)].box;
      for (auto& c : b.center) c += gen::uniform(rng, -0.3, 0.3);
      for (auto& d : b.dims) d *= gen::uniform(rng, 0.8, 1.2);
      preds.push_back({b, "A", 0});
    }
    const auto flags = greedy_match(gts, preds, opts);
    std::size_t greedy = 0;
    for (bool f : flags) greedy += f;
    std::vector<std::vector<bool>> eligible(gts.size(), std::vector<bool>(preds.size()));
    for (std::size_t g = 0; g < gts.size(); ++g) {
      for (std::size_t p = 0; p < preds.size(); ++p) eligible[g][p] = iou3d(gts[g].box, preds[p].box) >= 0.3;
    }
    const std::size_t best = oracle::max_matching(eligible);
    CHECK(greedy <= best);
    CHECK(2 * greedy >= best);
    if (separated) CHECK(greedy == best);
  }
}

TEST_CASE("density CSV is stable") {
  DensityRecord r;
  r.box_id = 2;
  r.s_z = 0.7;
  r.point_count = 15;
  r.horizontal_occupancy = 0.5;
  CHECK(density_csv({r}) == "box_id,s_z,point_count,horizontal_occupancy\n2,0.7,15,0.500000\n");
}

TEST_CASE("ground truth files with inline points") {
  const auto j = nlohmann::json::parse(R"([
    {"class": "Vehicle", "center": [0, 0, 0], "dims": [2, 2, 2], "heading": 0,
     "points": [[0, 0, -0.95], [0, 0, 0.95, 1.0]]},
    {"class": "Cyclist", "center": [5, 0, 0], "dims": [1, 1, 1], "heading": 0}
  ])");
  const auto gts = load_ground_truth(j);
  REQUIRE(gts.size() == 2);
  CHECK(gts[0].s_z == 0.2);
  CHECK(gts[1].s_z == 0.0);
  CHECK(gts[1].cls == "Cyclist");
  CHECK_THROWS_AS(load_ground_truth(nlohmann::json::parse(R"([{"center": [0,0,0], "dims": [1,1,1], "heading": 0}])")), Error);
  CHECK_THROWS_AS(load_predictions(nlohmann::json::object()), Error);
}
