// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/losses.hpp"

#include <algorithm>
#include <cmath>

#include "vpf/error.hpp"

namespace vpf {

namespace {

bool unit_interval(double v) noexcept { return v >= 0 && v <= 1; }

template <typename T, typename F>
double mean_of(const std::vector<T>& terms, F&& f) {
  if (terms.empty()) return 0;
  double sum = 0;
  for (const auto& t : terms) sum += f(t);
  return sum / static_cast<double>(terms.size());
}

}  // namespace

void LossWeights::validate() const {
  check(std::isfinite(gamma) && gamma >= 0, ErrorCode::Config, "loss gamma must be >= 0");
  check(unit_interval(focal_alpha), ErrorCode::Config, "focal alpha must lie in [0, 1]");
  check(std::isfinite(focal_gamma) && focal_gamma >= 0, ErrorCode::Config,
        "focal gamma must be >= 0");
}

double rectify_score(double s_cls, double iou_pred, double alpha) {
  check(unit_interval(s_cls) && unit_interval(iou_pred) && unit_interval(alpha),
        ErrorCode::OutOfRange, "rectify_score inputs must lie in [0, 1]");
  return std::pow(s_cls, 1 - alpha) * std::pow(iou_pred, alpha);
}

double encode_iou_target(double iou) {
  check(unit_interval(iou), ErrorCode::OutOfRange, "IoU must lie in [0, 1]");
  return std::clamp(2 * iou - 0.5, -1.0, 1.0);
}

double focal_loss(double p, bool positive, double alpha, double gamma) {
  check(unit_interval(p), ErrorCode::OutOfRange, "probability must lie in [0, 1]");
  const double q = std::clamp(p, kFocalEpsilon, 1 - kFocalEpsilon);
  const double pt = positive ? q : 1 - q;
  const double at = positive ? alpha : 1 - alpha;
  return -at * std::pow(1 - pt, gamma) * std::log(pt);
}

LossBreakdown overall_loss(const std::vector<ClassificationTerm>& cls,
                           const std::vector<IouTerm>& iou,
                           const std::vector<RegressionTerm>& reg,
                           const std::vector<DiouTerm>& diou, const LossWeights& weights) {
  weights.validate();
  check(iou.size() == reg.size() && reg.size() == diou.size(), ErrorCode::ShapeMismatch,
        "IoU, regression and DIoU batches must have equal length");
  for (const auto& r : reg) {
    check(r.predicted.size() == r.target.size(), ErrorCode::ShapeMismatch,
          "regression prediction and target differ in length");
    check(weights.reg_mask.empty() || weights.reg_mask.size() == r.target.size(),
          ErrorCode::ShapeMismatch, "regression mask length does not match residuals");
  }

  LossBreakdown out;
  out.cls = mean_of(cls, [&](const ClassificationTerm& t) {
    return focal_loss(t.p, t.positive, weights.focal_alpha, weights.focal_gamma);
  });
  out.iou = mean_of(iou, [](const IouTerm& t) {
    return std::abs(t.predicted - encode_iou_target(t.iou));
  });
  out.reg = mean_of(reg, [&](const RegressionTerm& t) {
    double s = 0;
    for (std::size_t k = 0; k < t.target.size(); ++k) {
      if (weights.reg_mask.empty() || weights.reg_mask[k]) {
        s += std::abs(t.predicted[k] - t.target[k]);
      }
    }
    return s;
  });
  out.diou = mean_of(diou, [](const DiouTerm& t) { return diou_loss(t.box, t.gt); });
  out.total = out.cls + out.iou + weights.gamma * (out.diou + out.reg);
  return out;
}

}  // namespace vpf
