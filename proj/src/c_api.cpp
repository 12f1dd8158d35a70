// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/vpf.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "vpf/analysis.hpp"
#include "vpf/backbone.hpp"
#include "vpf/config.hpp"
#include "vpf/io.hpp"
#include "vpf/losses.hpp"
#include "vpf/verify.hpp"
#include "vpf/weights.hpp"

struct vpf_config {
  vpf::RunConfig cfg;
};

struct vpf_cloud {
  vpf::PointCloud cloud;
};

struct vpf_model {
  vpf::RunConfig cfg;
  std::unique_ptr<vpf::Backbone> backbone;
};

namespace {

thread_local std::string last_error;

vpf_status status_of(vpf::ErrorCode code) {
  switch (code) {
    case vpf::ErrorCode::EmptyGrid: return VPF_ERR_EMPTY_GRID;
    case vpf::ErrorCode::ShapeMismatch: return VPF_ERR_SHAPE_MISMATCH;
    case vpf::ErrorCode::SpecMismatch: return VPF_ERR_SPEC_MISMATCH;
    case vpf::ErrorCode::ConsistencyViolation: return VPF_ERR_CONSISTENCY;
    case vpf::ErrorCode::DegenerateBox: return VPF_ERR_DEGENERATE_BOX;
    case vpf::ErrorCode::OutOfRange: return VPF_ERR_OUT_OF_RANGE;
    case vpf::ErrorCode::InvalidArgument: return VPF_ERR_INVALID_ARGUMENT;
    case vpf::ErrorCode::Io: return VPF_ERR_IO;
    case vpf::ErrorCode::Format: return VPF_ERR_FORMAT;
    case vpf::ErrorCode::Config: return VPF_ERR_CONFIG;
  }
  return VPF_ERR_INTERNAL;
}

template <typename F>
vpf_status guard(F&& body) noexcept {
  try {
    body();
    return VPF_OK;
  } catch (const vpf::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return VPF_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  vpf::check(p != nullptr, vpf::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

vpf::Box3D to_box(const vpf_box* b) {
  need(b, "box");
  return {{b->center[0], b->center[1], b->center[2]},
          {b->dims[0], b->dims[1], b->dims[2]},
          b->heading};
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::unique_ptr<vpf::Backbone> make_backbone(const vpf::RunConfig& cfg) {
  if (cfg.weights_path.empty()) {
    return std::make_unique<vpf::Backbone>(cfg.grid, cfg.backbone, cfg.seed);
  }
  const auto manifest = vpf::WeightStore::from_json(vpf::read_json(cfg.weights_path));
  return std::make_unique<vpf::Backbone>(cfg.grid, cfg.backbone, cfg.seed, &manifest);
}

}  // namespace

extern "C" {

const char* vpf_version(void) { return "0.1.0"; }

const char* vpf_status_name(vpf_status status) {
  switch (status) {
    case VPF_OK: return "ok";
    case VPF_ERR_EMPTY_GRID: return "EmptyGrid";
    case VPF_ERR_SHAPE_MISMATCH: return "ShapeMismatch";
    case VPF_ERR_SPEC_MISMATCH: return "SpecMismatch";
    case VPF_ERR_CONSISTENCY: return "ConsistencyViolation";
    case VPF_ERR_DEGENERATE_BOX: return "DegenerateBox";
    case VPF_ERR_OUT_OF_RANGE: return "OutOfRange";
    case VPF_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case VPF_ERR_IO: return "Io";
    case VPF_ERR_FORMAT: return "Format";
    case VPF_ERR_CONFIG: return "Config";
    case VPF_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* vpf_last_error(void) { return last_error.c_str(); }

void vpf_string_free(char* s) { std::free(s); }

vpf_status vpf_config_default(vpf_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new vpf_config{};
  });
}

vpf_status vpf_config_load(const char* path, vpf_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new vpf_config{vpf::load_config(path)};
  });
}

vpf_status vpf_config_from_json(const char* text, vpf_config** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      vpf::fail(vpf::ErrorCode::Format, std::string("config is not valid JSON: ") + e.what());
    }
    *out = new vpf_config{vpf::config_from_json(j)};
  });
}

vpf_status vpf_config_set_variant(vpf_config* cfg, const char* variant) {
  return guard([&] {
    need(cfg, "config");
    need(variant, "variant");
    const vpf::Variant v = vpf::parse_variant(variant);
    if (v == cfg->cfg.backbone.variant) return;
    auto next = vpf::BackboneConfig::defaults(v);
    next.submanifold_layers = cfg->cfg.backbone.submanifold_layers;
    next.sfl_steps = cfg->cfg.backbone.sfl_steps;
    next.sfl_kernel = cfg->cfg.backbone.sfl_kernel;
    next.block_activation = cfg->cfg.backbone.block_activation;
    next.validate();
    cfg->cfg.backbone = next;
  });
}

vpf_status vpf_config_set_weights(vpf_config* cfg, const char* manifest_path) {
  return guard([&] {
    need(cfg, "config");
    cfg->cfg.weights_path = manifest_path == nullptr ? "" : manifest_path;
  });
}

vpf_status vpf_config_to_json(const vpf_config* cfg, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = copy_string(vpf::config_to_json(cfg->cfg).dump(2) + "\n");
  });
}

void vpf_config_free(vpf_config* cfg) { delete cfg; }

vpf_status vpf_cloud_load(const char* path, vpf_cloud** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new vpf_cloud{vpf::read_cloud(path)};
  });
}

vpf_status vpf_cloud_from_points(const float* xyzi, size_t n, vpf_cloud** out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) need(xyzi, "points");
    auto cloud = std::make_unique<vpf_cloud>();
    cloud->cloud.points.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      const float* p = xyzi + 4 * i;
      cloud->cloud.points.push_back({p[0], p[1], p[2], p[3]});
    }
    *out = cloud.release();
  });
}

vpf_status vpf_cloud_save(const vpf_cloud* cloud, const char* path) {
  return guard([&] {
    need(cloud, "cloud");
    need(path, "path");
    vpf::write_cloud(path, cloud->cloud);
  });
}

size_t vpf_cloud_size(const vpf_cloud* cloud) { return cloud == nullptr ? 0 : cloud->cloud.size(); }

void vpf_cloud_free(vpf_cloud* cloud) { delete cloud; }

vpf_status vpf_voxelize(const vpf_config* cfg, const vpf_cloud* cloud, const char* out_path) {
  return guard([&] {
    need(cfg, "config");
    need(cloud, "cloud");
    need(out_path, "output path");
    const auto backbone = make_backbone(cfg->cfg);
    const auto voxels = vpf::build_voxel_features(cloud->cloud, cfg->cfg.grid);
    const auto pillars = vpf::build_pillar_features(cloud->cloud, cfg->cfg.grid,
                                                    backbone->weights().point_encoder);
    vpf::write_dump(out_path, {vpf::to_record("voxels", voxels), vpf::to_record("pillars", pillars)});
  });
}

vpf_status vpf_model_create(const vpf_config* cfg, vpf_model** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    auto model = std::make_unique<vpf_model>();
    model->cfg = cfg->cfg;
    model->backbone = make_backbone(cfg->cfg);
    *out = model.release();
  });
}

vpf_status vpf_model_forward(const vpf_model* model, const vpf_cloud* cloud, const char* out_path,
                             const char* intermediates_dir) {
  return guard([&] {
    need(model, "model");
    need(cloud, "cloud");
    need(out_path, "output path");
    const auto result = model->backbone->forward(cloud->cloud);
    if (intermediates_dir != nullptr) {
      const std::filesystem::path dir(intermediates_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      vpf::check(!ec, vpf::ErrorCode::Io, "cannot create directory '" + dir.string() + "'");
      for (auto& record : vpf::forward_records(result, true)) {
        if (record.name == "readout") continue;
        const auto path = dir / (record.name + ".vpft");
        vpf::write_dump(path, {std::move(record)});
      }
    }
    vpf::write_dump(out_path, vpf::forward_records(result, false));
  });
}

vpf_status vpf_model_export_weights(const vpf_model* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    vpf::write_file_atomic(path, model->backbone->parameters().to_json().dump() + "\n");
  });
}

void vpf_model_free(vpf_model* model) { delete model; }

vpf_status vpf_iou3d(const vpf_box* a, const vpf_box* b, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vpf::iou3d(to_box(a), to_box(b));
  });
}

vpf_status vpf_diou_loss(const vpf_box* b, const vpf_box* gt, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vpf::diou_loss(to_box(b), to_box(gt));
  });
}

vpf_status vpf_rectify_score(double s_cls, double iou_pred, double alpha, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vpf::rectify_score(s_cls, iou_pred, alpha);
  });
}

vpf_status vpf_encode_iou_target(double iou, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vpf::encode_iou_target(iou);
  });
}

vpf_status vpf_focal_loss(double p, int positive, double alpha, double gamma, double* out) {
  return guard([&] {
    need(out, "out");
    *out = vpf::focal_loss(p, positive != 0, alpha, gamma);
  });
}

vpf_status vpf_density_csv(const char* cloud_path, const char* boxes_path, const char* out_path) {
  return guard([&] {
    need(cloud_path, "cloud path");
    need(boxes_path, "boxes path");
    need(out_path, "output path");
    const auto cloud = vpf::read_cloud(cloud_path);
    const auto boxes = vpf::load_boxes(vpf::read_json(boxes_path));
    std::vector<vpf::DensityRecord> records;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      records.push_back(vpf::vertical_density(cloud, boxes[i], i));
    }
    vpf::write_file_atomic(out_path, vpf::density_csv(records));
  });
}

vpf_status vpf_recall_csv(const vpf_config* cfg, const char* gt_path, const char* pred_path,
                          double threshold, const char* out_path) {
  return guard([&] {
    need(gt_path, "ground-truth path");
    need(pred_path, "prediction path");
    need(out_path, "output path");
    vpf::RecallOptions options;
    if (threshold > 0) {
      options.uniform = threshold;
    } else {
      const vpf::RunConfig fallback;
      for (const auto& c : (cfg != nullptr ? cfg->cfg : fallback).classes) {
        options.thresholds[c.name] = c.iou_threshold;
      }
    }
    const std::filesystem::path gt_file(gt_path);
    const auto gts = vpf::load_ground_truth(vpf::read_json(gt_file), gt_file.parent_path());
    const auto preds = vpf::load_predictions(vpf::read_json(pred_path));
    vpf::write_file_atomic(out_path, vpf::recall_csv(vpf::recall_by_density(gts, preds, options)));
  });
}

vpf_status vpf_iou_check(size_t trials, uint64_t seed, double* max_error) {
  return guard([&] {
    need(max_error, "max_error");
    vpf::check(trials > 0, vpf::ErrorCode::InvalidArgument, "trials must be positive");
    *max_error = vpf::verify::iou_monte_carlo_error(trials, seed);
  });
}

vpf_status vpf_selftest(uint64_t seed, vpf_selftest_callback callback, void* user,
                        int* failures) {
  return guard([&] {
    int failed = 0;
    vpf::verify::run_all(seed, [&](const vpf::verify::CriterionResult& r) {
      if (!r.passed) ++failed;
      if (callback != nullptr) {
        callback(r.id, r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
      }
    });
    if (failures != nullptr) *failures = failed;
  });
}

}  // extern "C"
