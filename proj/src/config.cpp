// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "vpf/io.hpp"

namespace vpf {

namespace {

using nlohmann::json;

void require_object(const json& j, const char* context) {
  check(j.is_object(), ErrorCode::Config, std::string(context) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* context) {
  for (const auto& [key, _] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    check(known, ErrorCode::Config, std::string("unknown key '") + key + "' in " + context);
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out, const char* context) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::Config, std::string("key '") + key + "' in " + context + " has the wrong type");
  }
}

GridSpec grid_from_json(const json& j) {
  require_object(j, "grid");
  reject_unknown(j, {"range_min", "range_max", "voxel_size"}, "grid");
  const GridSpec d = RunConfig::default_grid();
  Vec3 lo = d.range_min();
  Vec3 hi = d.range_max();
  Vec3 size = d.voxel_size();
  read_if(j, "range_min", lo, "grid");
  read_if(j, "range_max", hi, "grid");
  read_if(j, "voxel_size", size, "grid");
  try {
    return GridSpec::create(lo, hi, size);
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("invalid grid: ") + e.what());
  }
}

BackboneConfig backbone_from_json(const json& j) {
  require_object(j, "backbone");
  reject_unknown(j,
                 {"variant", "voxel_channels", "pillar_channels", "submanifold_layers",
                  "sfl_steps", "sfl_kernel", "block_activation", "neck_layers",
                  "neck_channels", "neck_activation", "extra_voxel_channels",
                  "extra_pillar_channels", "readout_channels"},
                 "backbone");
  std::string variant = "dense";
  read_if(j, "variant", variant, "backbone");
  BackboneConfig b = BackboneConfig::defaults(parse_variant(variant));
  read_if(j, "voxel_channels", b.voxel_channels, "backbone");
  read_if(j, "pillar_channels", b.pillar_channels, "backbone");
  read_if(j, "submanifold_layers", b.submanifold_layers, "backbone");
  read_if(j, "sfl_steps", b.sfl_steps, "backbone");
  read_if(j, "sfl_kernel", b.sfl_kernel, "backbone");
  read_if(j, "block_activation", b.block_activation, "backbone");
  read_if(j, "neck_layers", b.neck_layers, "backbone");
  read_if(j, "neck_channels", b.neck_channels, "backbone");
  read_if(j, "neck_activation", b.neck_activation, "backbone");
  read_if(j, "extra_voxel_channels", b.extra_voxel_channels, "backbone");
  read_if(j, "extra_pillar_channels", b.extra_pillar_channels, "backbone");
  read_if(j, "readout_channels", b.readout_channels, "backbone");
  return b;
}

LossWeights loss_from_json(const json& j) {
  require_object(j, "loss");
  reject_unknown(j, {"gamma", "focal_alpha", "focal_gamma", "reg_mask"}, "loss");
  LossWeights w;
  read_if(j, "gamma", w.gamma, "loss");
  read_if(j, "focal_alpha", w.focal_alpha, "loss");
  read_if(j, "focal_gamma", w.focal_gamma, "loss");
  read_if(j, "reg_mask", w.reg_mask, "loss");
  return w;
}

std::vector<ClassSetting> classes_from_json(const json& j) {
  check(j.is_array(), ErrorCode::Config, "classes must be a JSON array");
  std::vector<ClassSetting> out;
  for (const auto& c : j) {
    require_object(c, "class entry");
    reject_unknown(c, {"name", "iou_threshold", "alpha"}, "class entry");
    check(c.contains("name"), ErrorCode::Config, "class entry needs a name");
    ClassSetting s;
    read_if(c, "name", s.name, "class entry");
    read_if(c, "iou_threshold", s.iou_threshold, "class entry");
    read_if(c, "alpha", s.rectify_alpha, "class entry");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

GridSpec RunConfig::default_grid() {
  return GridSpec::create({0.0, -6.4, -2.0}, {12.8, 6.4, 4.0}, {0.1, 0.1, 0.15});
}

std::vector<ClassSetting> RunConfig::default_classes() {
  return {{"Vehicle", 0.8, 0.68}, {"Pedestrian", 0.55, 0.71}, {"Cyclist", 0.55, 0.65}};
}

const ClassSetting* RunConfig::find_class(const std::string& name) const noexcept {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void RunConfig::validate() const {
  backbone.validate();
  loss.validate();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    check(!c.name.empty(), ErrorCode::Config, "class names must be non-empty");
    check(c.iou_threshold > 0 && c.iou_threshold < 1, ErrorCode::Config,
          "class IoU threshold must lie in (0, 1)");
    check(c.rectify_alpha >= 0 && c.rectify_alpha <= 1, ErrorCode::Config,
          "class rectification alpha must lie in [0, 1]");
    for (std::size_t k = 0; k < i; ++k) {
      check(classes[k].name != c.name, ErrorCode::Config, "duplicate class '" + c.name + "'");
    }
  }
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "config");
  reject_unknown(j, {"grid", "backbone", "loss", "classes", "seed", "weights"}, "config");
  RunConfig cfg;
  if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
  if (j.contains("backbone")) cfg.backbone = backbone_from_json(j.at("backbone"));
  if (j.contains("loss")) cfg.loss = loss_from_json(j.at("loss"));
  if (j.contains("classes")) cfg.classes = classes_from_json(j.at("classes"));
  read_if(j, "seed", cfg.seed, "config");
  read_if(j, "weights", cfg.weights_path, "config");
  if (!cfg.weights_path.empty() && !base_dir.empty() &&
      std::filesystem::path(cfg.weights_path).is_relative()) {
    cfg.weights_path = (base_dir / cfg.weights_path).lexically_normal().string();
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const auto& b = cfg.backbone;
  json classes = json::array();
  for (const auto& c : cfg.classes) {
    classes.push_back({{"name", c.name}, {"iou_threshold", c.iou_threshold},
                       {"alpha", c.rectify_alpha}});
  }
  json out{
      {"grid",
       {{"range_min", cfg.grid.range_min()},
        {"range_max", cfg.grid.range_max()},
        {"voxel_size", cfg.grid.voxel_size()}}},
      {"backbone",
       {{"variant", to_string(b.variant)},
        {"voxel_channels", b.voxel_channels},
        {"pillar_channels", b.pillar_channels},
        {"submanifold_layers", b.submanifold_layers},
        {"sfl_steps", b.sfl_steps},
        {"sfl_kernel", b.sfl_kernel},
        {"block_activation", b.block_activation},
        {"neck_layers", b.neck_layers},
        {"neck_channels", b.neck_channels},
        {"neck_activation", b.neck_activation},
        {"extra_voxel_channels", b.extra_voxel_channels},
        {"extra_pillar_channels", b.extra_pillar_channels},
        {"readout_channels", b.readout_channels}}},
      {"loss",
       {{"gamma", cfg.loss.gamma},
        {"focal_alpha", cfg.loss.focal_alpha},
        {"focal_gamma", cfg.loss.focal_gamma},
        {"reg_mask", cfg.loss.reg_mask}}},
      {"classes", std::move(classes)},
      {"seed", cfg.seed},
  };
  if (!cfg.weights_path.empty()) out["weights"] = cfg.weights_path;
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json(path), path.parent_path());
}

}  // namespace vpf
