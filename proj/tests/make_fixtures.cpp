// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

// Usage: vpf_make_fixtures <dir>
// Writes cloud.vpf, box_cloud.vpf, boxes.json, gt.json, pred.json and bad.vpf.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "vpf/vpf.h"

namespace {

bool save(const std::vector<float>& xyzi, const std::string& path) {
  vpf_cloud* cloud = nullptr;
  if (vpf_cloud_from_points(xyzi.data(), xyzi.size() / 4, &cloud) != VPF_OK) return false;
  const bool ok = vpf_cloud_save(cloud, path.c_str()) == VPF_OK;
  vpf_cloud_free(cloud);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <dir>\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> x(0.0f, 12.8f), y(-6.4f, 6.4f), z(-2.0f, 4.0f), r(0, 1);
  std::vector<float> xyzi;
  for (int i = 0; i < 3000; ++i) xyzi.insert(xyzi.end(), {x(rng), y(rng), z(rng), r(rng)});
  if (!save(xyzi, dir + "/cloud.vpf")) return 1;

  // Ten points at the vertical bin centres of a 4 x 2 x 2 box at (5, 1, 0).
  xyzi.clear();
  for (int k = 0; k < 10; ++k) xyzi.insert(xyzi.end(), {5.0f, 1.0f, -1.0f + 0.2f * k + 0.1f, 0.5f});
  if (!save(xyzi, dir + "/box_cloud.vpf")) return 1;

  std::ofstream(dir + "/boxes.json")
      << R"([{"center": [5, 1, 0], "dims": [4, 2, 2], "heading": 0.3}])";
  std::ofstream(dir + "/gt.json")
      << R"({"cloud": "box_cloud.vpf", "boxes": [
  {"class": "Vehicle", "center": [5, 1, 0], "dims": [4, 2, 2], "heading": 0.3},
  {"class": "Pedestrian", "center": [9, -3, 0], "dims": [0.8, 0.8, 1.8], "heading": 0}]})";
  std::ofstream(dir + "/pred.json")
      << R"([{"class": "Vehicle", "center": [5.05, 1, 0], "dims": [4, 2, 2], "heading": 0.3}])";
  std::ofstream(dir + "/bad.vpf", std::ios::binary) << "NOPE";
  return 0;
}
