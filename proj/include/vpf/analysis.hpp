// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vpf/geometry.hpp"
#include "vpf/grid.hpp"

namespace vpf {

inline constexpr int kDensityBins = 10;

struct DensityRecord {
  std::size_t box_id = 0;
  double s_z = 0;  // occupied vertical bins / 10
  std::size_t point_count = 0;
  double horizontal_occupancy = 0;  // sqrt(S_X * S_Y)
  std::array<bool, kDensityBins> z_bins{};
};

// Bin of a local coordinate in [-extent/2, extent/2]; the upper face falls
// into the top bin.
int density_bin(double local, double extent) noexcept;

// Box-frame coordinates of a world point.
std::array<double, 3> to_box_frame(const Box3D& b, double x, double y, double z) noexcept;

DensityRecord vertical_density(const PointCloud& cloud, const Box3D& box,
                               std::size_t box_id = 0);

// box_id,s_z,point_count,horizontal_occupancy
std::string density_csv(const std::vector<DensityRecord>& records);

struct LabeledBox {
  Box3D box;
  std::string cls;
  double s_z = 0;  // ground truth only
};

struct RecallOptions {
  std::map<std::string, double> thresholds;  // per class
  std::optional<double> uniform;             // overrides `thresholds`
  double threshold_for(const std::string& cls) const;
};

struct RecallRow {
  double s_z = 0;
  std::size_t total = 0;
  std::size_t recalled = 0;
  double recall() const noexcept {
    return total == 0 ? 0 : static_cast<double>(recalled) / static_cast<double>(total);
  }
};

// Greedy matching: same-class pairs with IoU >= threshold, taken in
// descending IoU order (ties by gt, then prediction index); each box is
// matched at most once. Returns the recalled flag per ground truth.
std::vector<bool> greedy_match(const std::vector<LabeledBox>& gts,
                               const std::vector<LabeledBox>& preds,
                               const RecallOptions& options);

// One row per S_Z value present among the ground truths, ascending.
std::vector<RecallRow> recall_by_density(const std::vector<LabeledBox>& gts,
                                         const std::vector<LabeledBox>& preds,
                                         const RecallOptions& options);

// s_z,total,recalled,recall
std::string recall_csv(const std::vector<RecallRow>& rows);

// Ground-truth file: either an array of boxes, each with "class" and an
// optional "points" list of [x, y, z(, i)], or {"cloud": path, "boxes": [...]}
// with the cloud path relative to `base_dir`. S_Z is filled in.
std::vector<LabeledBox> load_ground_truth(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir = {});
// Array of boxes with "class"; other keys are ignored.
std::vector<LabeledBox> load_predictions(const nlohmann::json& j);
// Array of plain boxes.
std::vector<Box3D> load_boxes(const nlohmann::json& j);

}  // namespace vpf
