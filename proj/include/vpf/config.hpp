// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vpf/backbone.hpp"
#include "vpf/grid.hpp"
#include "vpf/losses.hpp"

namespace vpf {

struct ClassSetting {
  std::string name;
  double iou_threshold = 0.5;
  double rectify_alpha = 0.5;

  bool operator==(const ClassSetting&) const = default;
};

struct RunConfig {
  GridSpec grid = default_grid();
  BackboneConfig backbone;
  LossWeights loss;
  std::vector<ClassSetting> classes = default_classes();
  std::uint64_t seed = 0;
  std::string weights_path;  // optional weight manifest

  // 12.8 m x 12.8 m x 6 m at 0.1 x 0.1 x 0.15 m voxels (128 x 128 x 40).
  static GridSpec default_grid();
  // Vehicle / Pedestrian / Cyclist IoU thresholds and rectification alphas.
  static std::vector<ClassSetting> default_classes();

  const ClassSetting* find_class(const std::string& name) const noexcept;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

// Missing keys take defaults; unknown keys throw Config. Relative
// weights_path entries resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace vpf
