// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "vpf/geometry.hpp"

namespace vpf {

struct LossWeights {
  double gamma = 1.0;          // weight on (L_diou + L_reg)
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  std::vector<bool> reg_mask;  // empty: every residual component counts

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

// s_cls^(1 - alpha) * iou_pred^alpha. Throws OutOfRange outside [0, 1].
double rectify_score(double s_cls, double iou_pred, double alpha);

// clamp(2 * iou - 0.5, -1, 1). Throws OutOfRange for iou outside [0, 1].
double encode_iou_target(double iou);

inline constexpr double kFocalEpsilon = 1e-7;

// Binary focal loss. p is clamped to [eps, 1 - eps]; values outside [0, 1]
// throw OutOfRange.
double focal_loss(double p, bool positive, double alpha, double gamma);

struct ClassificationTerm {
  double p;
  bool positive;
};

struct IouTerm {
  double predicted;  // raw IoU-head output, compared to the encoded target
  double iou;        // IoU of the matched box with its ground truth
};

struct RegressionTerm {
  std::vector<double> predicted;
  std::vector<double> target;
};

struct DiouTerm {
  Box3D box;
  Box3D gt;
};

struct LossBreakdown {
  double cls = 0;
  double iou = 0;
  double reg = 0;
  double diou = 0;
  double total = 0;
};

// mean(L_cls) + mean(L_iou) + gamma * (mean(L_diou) + mean(L_reg)). The IoU,
// regression and DIoU batches describe the same positives and must align.
LossBreakdown overall_loss(const std::vector<ClassificationTerm>& cls,
                           const std::vector<IouTerm>& iou,
                           const std::vector<RegressionTerm>& reg,
                           const std::vector<DiouTerm>& diou, const LossWeights& weights);

}  // namespace vpf
