// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "vpf/error.hpp"
#include "vpf/io.hpp"

namespace vpf {

namespace {

std::string format_row(const char* fmt, auto... args) {
  char buf[128];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::max(n, 0)));
}

double bin_fraction(const std::array<bool, kDensityBins>& bins) noexcept {
  return static_cast<double>(std::count(bins.begin(), bins.end(), true)) / kDensityBins;
}

std::string class_of(const nlohmann::json& j) {
  check(j.is_object() && j.contains("class") && j.at("class").is_string(), ErrorCode::Format,
        "every labeled box needs a string \"class\"");
  return j.at("class").get<std::string>();
}

PointCloud points_of(const nlohmann::json& j) {
  PointCloud cloud;
  if (!j.contains("points")) return cloud;
  check(j.at("points").is_array(), ErrorCode::Format, "\"points\" must be an array");
  for (const auto& p : j.at("points")) {
    check(p.is_array() && (p.size() == 3 || p.size() == 4), ErrorCode::Format,
          "each point must be [x, y, z] or [x, y, z, intensity]");
    try {
      Point q{p[0].get<double>(), p[1].get<double>(), p[2].get<double>(),
              p.size() == 4 ? p[3].get<double>() : 0.0};
      cloud.points.push_back(q);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::Format, "point coordinates must be numbers");
    }
  }
  return cloud;
}

}  // namespace

int density_bin(double local, double extent) noexcept {
  const int bin = static_cast<int>(std::floor((local / extent + 0.5) * kDensityBins));
  return std::clamp(bin, 0, kDensityBins - 1);
}

std::array<double, 3> to_box_frame(const Box3D& b, double x, double y, double z) noexcept {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double dx = x - b.center[0];
  const double dy = y - b.center[1];
  return {dx * c + dy * s, -dx * s + dy * c, z - b.center[2]};
}

DensityRecord vertical_density(const PointCloud& cloud, const Box3D& box, std::size_t box_id) {
  validate_box(box);
  DensityRecord rec;
  rec.box_id = box_id;
  std::array<bool, kDensityBins> x_bins{};
  std::array<bool, kDensityBins> y_bins{};
  for (const auto& p : cloud.points) {
    const auto l = to_box_frame(box, p.x, p.y, p.z);
    bool inside = true;
    for (int a = 0; a < 3; ++a) inside = inside && std::abs(l[a]) <= box.dims[a] / 2;
    if (!inside) continue;
    ++rec.point_count;
    x_bins[density_bin(l[0], box.dims[0])] = true;
    y_bins[density_bin(l[1], box.dims[1])] = true;
    rec.z_bins[density_bin(l[2], box.dims[2])] = true;
  }
  rec.s_z = bin_fraction(rec.z_bins);
  rec.horizontal_occupancy = std::sqrt(bin_fraction(x_bins) * bin_fraction(y_bins));
  return rec;
}

std::string density_csv(const std::vector<DensityRecord>& records) {
  std::string out = "box_id,s_z,point_count,horizontal_occupancy\n";
  for (const auto& r : records) {
    out += format_row("%zu,%.1f,%zu,%.6f\n", r.box_id, r.s_z, r.point_count,
                      r.horizontal_occupancy);
  }
  return out;
}

double RecallOptions::threshold_for(const std::string& cls) const {
  double t = 0;
  if (uniform) {
    t = *uniform;
  } else {
    const auto it = thresholds.find(cls);
    check(it != thresholds.end(), ErrorCode::Config, "no IoU threshold for class '" + cls + "'");
    t = it->second;
  }
  check(t > 0 && t < 1, ErrorCode::OutOfRange, "IoU threshold must lie in (0, 1)");
  return t;
}

std::vector<bool> greedy_match(const std::vector<LabeledBox>& gts,
                               const std::vector<LabeledBox>& preds,
                               const RecallOptions& options) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const double t = options.threshold_for(gts[g].cls);
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].cls != gts[g].cls) continue;
      const double iou = iou3d(gts[g].box, preds[p].box);
      if (iou >= t) pairs.emplace_back(iou, g, p);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> pred_used(preds.size(), false);
  for (const auto& [iou, g, p] : pairs) {
    if (gt_used[g] || pred_used[p]) continue;
    gt_used[g] = true;
    pred_used[p] = true;
  }
  return gt_used;
}

std::vector<RecallRow> recall_by_density(const std::vector<LabeledBox>& gts,
                                         const std::vector<LabeledBox>& preds,
                                         const RecallOptions& options) {
  const auto recalled = greedy_match(gts, preds, options);
  std::map<int, RecallRow> rows;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const int key = static_cast<int>(std::lround(gts[g].s_z * kDensityBins));
    auto& row = rows[key];
    row.s_z = static_cast<double>(key) / kDensityBins;
    ++row.total;
    if (recalled[g]) ++row.recalled;
  }
  std::vector<RecallRow> out;
  for (const auto& [_, row] : rows) out.push_back(row);
  return out;
}

std::string recall_csv(const std::vector<RecallRow>& rows) {
  std::string out = "s_z,total,recalled,recall\n";
  for (const auto& r : rows) {
    out += format_row("%.1f,%zu,%zu,%.6f\n", r.s_z, r.total, r.recalled, r.recall());
  }
  return out;
}

std::vector<LabeledBox> load_ground_truth(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir) {
  std::vector<LabeledBox> out;
  if (j.is_object()) {
    check(j.contains("cloud") && j.at("cloud").is_string() && j.contains("boxes"),
          ErrorCode::Format, "ground-truth object needs \"cloud\" and \"boxes\"");
    std::filesystem::path cloud_path = j.at("cloud").get<std::string>();
    if (cloud_path.is_relative()) cloud_path = base_dir / cloud_path;
    const PointCloud cloud = read_cloud(cloud_path);
    const auto& boxes = j.at("boxes");
    check(boxes.is_array(), ErrorCode::Format, "\"boxes\" must be an array");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      LabeledBox b{box_from_json(boxes[i]), class_of(boxes[i]), 0};
      b.s_z = vertical_density(cloud, b.box, i).s_z;
      out.push_back(std::move(b));
    }
    return out;
  }
  check(j.is_array(), ErrorCode::Format, "ground truth must be an array or an object");
  for (std::size_t i = 0; i < j.size(); ++i) {
    LabeledBox b{box_from_json(j[i]), class_of(j[i]), 0};
    b.s_z = vertical_density(points_of(j[i]), b.box, i).s_z;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<LabeledBox> load_predictions(const nlohmann::json& j) {
  check(j.is_array(), ErrorCode::Format, "predictions must be a JSON array");
  std::vector<LabeledBox> out;
  for (const auto& e : j) out.push_back({box_from_json(e), class_of(e), 0});
  return out;
}

std::vector<Box3D> load_boxes(const nlohmann::json& j) {
  check(j.is_array(), ErrorCode::Format, "boxes must be a JSON array");
  std::vector<Box3D> out;
  for (const auto& e : j) out.push_back(box_from_json(e));
  return out;
}

}  // namespace vpf
