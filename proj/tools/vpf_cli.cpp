// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vpf/vpf.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct ConfigDeleter {
  void operator()(vpf_config* c) const { vpf_config_free(c); }
};
struct CloudDeleter {
  void operator()(vpf_cloud* c) const { vpf_cloud_free(c); }
};
struct ModelDeleter {
  void operator()(vpf_model* m) const { vpf_model_free(m); }
};
using ConfigPtr = std::unique_ptr<vpf_config, ConfigDeleter>;
using CloudPtr = std::unique_ptr<vpf_cloud, CloudDeleter>;
using ModelPtr = std::unique_ptr<vpf_model, ModelDeleter>;

// Thrown to unwind a subcommand after the diagnostic has been printed.
struct Failed {};

void ok(vpf_status s) {
  if (s == VPF_OK) return;
  std::fprintf(stderr, "vpf: error [%s]: %s\n", vpf_status_name(s), vpf_last_error());
  throw Failed{};
}

ConfigPtr load_config(const std::string& path) {
  vpf_config* cfg = nullptr;
  ok(path.empty() ? vpf_config_default(&cfg) : vpf_config_load(path.c_str(), &cfg));
  return ConfigPtr(cfg);
}

CloudPtr load_cloud(const std::string& path) {
  vpf_cloud* cloud = nullptr;
  ok(vpf_cloud_load(path.c_str(), &cloud));
  return CloudPtr(cloud);
}

void print_criterion(int id, const char* name, int passed, const char* detail, double seconds,
                     void*) {
  std::printf("[%s] %2d %-34s %6.2fs  %s\n", passed ? "PASS" : "FAIL", id, name, seconds, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel-pillar fusion backbone tools"};
  app.require_subcommand(1);

  std::string cloud_path;
  std::string config_path;
  std::string out_path;

  auto* voxelize = app.add_subcommand("voxelize", "Write the initial voxel and pillar tensors");
  voxelize->add_option("cloud", cloud_path, "VPF1 point cloud")->required();
  voxelize->add_option("--config", config_path, "JSON run configuration");
  voxelize->add_option("--out", out_path, "Output tensor dump")->required();

  std::string weights_path;
  std::string dump_dir;
  std::string variant;
  std::string save_weights;
  auto* forward = app.add_subcommand("forward", "Run the backbone and write the readout");
  forward->add_option("cloud", cloud_path, "VPF1 point cloud")->required();
  forward->add_option("--config", config_path, "JSON run configuration");
  forward->add_option("--weights", weights_path, "Weight manifest (overrides the config)");
  forward->add_option("--dump-intermediates", dump_dir, "Directory for encoder tensor dumps");
  forward->add_option("--variant", variant, "Readout variant")
      ->check(CLI::IsMember({"dense", "sparse"}));
  forward->add_option("--out", out_path, "Readout tensor dump")->default_val("readout.vpft");
  forward->add_option("--save-weights", save_weights, "Write the model's weight manifest");

  std::string boxes_path;
  auto* density = app.add_subcommand("density", "Vertical density per box as CSV");
  density->add_option("cloud", cloud_path, "VPF1 point cloud")->required();
  density->add_option("boxes", boxes_path, "JSON array of boxes")->required();
  density->add_option("--out", out_path, "Output CSV")->required();

  std::string gt_path;
  std::string pred_path;
  std::optional<double> threshold;
  auto* recall = app.add_subcommand("recall", "Recall per vertical density as CSV");
  recall->add_option("gt", gt_path, "Ground-truth JSON")->required();
  recall->add_option("pred", pred_path, "Prediction JSON")->required();
  recall->add_option("--threshold", threshold, "IoU threshold for every class");
  recall->add_option("--config", config_path, "JSON run configuration (per-class thresholds)");
  recall->add_option("--out", out_path, "Output CSV")->required();

  std::size_t trials = 50;
  std::uint64_t seed = 0;
  auto* iou_check = app.add_subcommand("iou-check", "Compare rotated IoU with Monte Carlo");
  iou_check->add_option("--trials", trials, "Random box pairs")->check(CLI::PositiveNumber);
  iou_check->add_option("--seed", seed, "Random seed");

  std::uint64_t selftest_seed = 20260117;
  auto* selftest = app.add_subcommand("selftest", "Run every oracle suite");
  selftest->add_option("--seed", selftest_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*voxelize) {
      const auto cfg = load_config(config_path);
      const auto cloud = load_cloud(cloud_path);
      ok(vpf_voxelize(cfg.get(), cloud.get(), out_path.c_str()));
    } else if (*forward) {
      const auto cfg = load_config(config_path);
      if (!variant.empty()) ok(vpf_config_set_variant(cfg.get(), variant.c_str()));
      if (!weights_path.empty()) ok(vpf_config_set_weights(cfg.get(), weights_path.c_str()));
      const auto cloud = load_cloud(cloud_path);
      vpf_model* raw = nullptr;
      ok(vpf_model_create(cfg.get(), &raw));
      const ModelPtr model(raw);
      ok(vpf_model_forward(model.get(), cloud.get(), out_path.c_str(),
                           dump_dir.empty() ? nullptr : dump_dir.c_str()));
      if (!save_weights.empty()) ok(vpf_model_export_weights(model.get(), save_weights.c_str()));
    } else if (*density) {
      ok(vpf_density_csv(cloud_path.c_str(), boxes_path.c_str(), out_path.c_str()));
    } else if (*recall) {
      if (threshold && !(*threshold > 0 && *threshold < 1)) {
        std::fprintf(stderr, "vpf: error [OutOfRange]: --threshold must lie in (0, 1)\n");
        return kFailure;
      }
      const auto cfg = load_config(config_path);
      ok(vpf_recall_csv(cfg.get(), gt_path.c_str(), pred_path.c_str(), threshold.value_or(0),
                        out_path.c_str()));
    } else if (*iou_check) {
      double err = 0;
      ok(vpf_iou_check(trials, seed, &err));
      std::printf("max |clipped IoU - Monte-Carlo IoU| over %zu pairs: %.6f (tolerance 0.01)\n",
                  trials, err);
      return err <= 0.01 ? kOk : kFailure;
    } else if (*selftest) {
      int failures = 0;
      ok(vpf_selftest(selftest_seed, print_criterion, nullptr, &failures));
      std::printf("%d of 10 criteria failed\n", failures);
      return failures == 0 ? kOk : kFailure;
    }
  } catch (const Failed&) {
    return kFailure;
  }
  return kOk;
}
