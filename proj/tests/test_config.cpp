// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include "helpers.hpp"
#include "vpf/config.hpp"
#include "vpf/io.hpp"

using namespace vpf;
using nlohmann::json;

TEST_CASE("default classes carry the configured thresholds and alphas") {
  const RunConfig cfg;
  REQUIRE(cfg.classes.size() == 3);
  CHECK(cfg.find_class("Vehicle")->iou_threshold == 0.8);
  CHECK(cfg.find_class("Pedestrian")->iou_threshold == 0.55);
  CHECK(cfg.find_class("Cyclist")->iou_threshold == 0.55);
  CHECK(cfg.find_class("Vehicle")->rectify_alpha == 0.68);
  CHECK(cfg.find_class("Pedestrian")->rectify_alpha == 0.71);
  CHECK(cfg.find_class("Cyclist")->rectify_alpha == 0.65);
  CHECK(cfg.find_class("Truck") == nullptr);
  CHECK(cfg.loss.gamma == 1.0);
}

TEST_CASE("configs round-trip load -> serialize -> load") {
  const json j = {{"grid", {{"range_min", {0, 0, -1}}, {"range_max", {6.4, 6.4, 2.2}}, {"voxel_size", {0.1, 0.1, 0.2}}}},
                  {"backbone", {{"variant", "sparse"}, {"submanifold_layers", 1}, {"sfl_steps", {true, false, true, false}}}},
                  {"loss", {{"gamma", 2.0}, {"reg_mask", {true, true, false}}}},
                  {"classes", {{{"name", "Car"}, {"iou_threshold", 0.7}, {"alpha", 0.5}}}},
                  {"seed", 42}};
  const auto a = config_from_json(j);
  CHECK(a.backbone.variant == Variant::Sparse);
  CHECK(a.backbone.submanifold_layers == 1);
  CHECK(a.seed == 42);
  const auto b = config_from_json(config_to_json(a));
  CHECK(a == b);
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(config_from_json(config_to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("unknown keys are rejected at every level") {
  auto code = [](const json& j) {
    try {
      config_from_json(j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code(json{{"sed", 1}}) == ErrorCode::Config);
  CHECK(code(json{{"grid", {{"voxel", {1, 1, 1}}}}}) == ErrorCode::Config);
  CHECK(code(json{{"backbone", {{"channels", 3}}}}) == ErrorCode::Config);
  CHECK(code(json{{"loss", {{"beta", 1}}}}) == ErrorCode::Config);
  CHECK(code(json{{"classes", {{{"name", "A"}, {"thr", 0.5}}}}}) == ErrorCode::Config);
  CHECK(code(json{{"seed", "zero"}}) == ErrorCode::Config);
  CHECK(code(json{{"classes", {{{"name", "A"}, {"iou_threshold", 1.5}}}}}) == ErrorCode::Config);
  CHECK(code(json{{"grid", {{"voxel_size", {0, 1, 1}}}}}) == ErrorCode::Config);
  CHECK(code(json::array()) == ErrorCode::Config);
}

TEST_CASE("relative weight paths resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "vpf_config_tests";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "run.json", std::string_view(R"({"weights": "w/model.json"})"));
  const auto cfg = load_config(dir / "run.json");
  CHECK(cfg.weights_path == (dir / "w/model.json").string());
  CHECK(load_config(dir / "run.json") == config_from_json(config_to_json(cfg)));
}
