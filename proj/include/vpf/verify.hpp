// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks, each comparing the implementation against a brute-force
// oracle or an exact identity on seeded random instances.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vpf::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 20260117;

CriterionResult sparse_conv_equivalence(std::uint64_t seed);
CriterionResult bev_consistency(std::uint64_t seed);
CriterionResult sfl_correctness(std::uint64_t seed);
CriterionResult rotated_iou(std::uint64_t seed);
CriterionResult diou_gradient(std::uint64_t seed);
CriterionResult rectification_identities(std::uint64_t seed);
CriterionResult loss_recomposition(std::uint64_t seed);
CriterionResult vertical_density(std::uint64_t seed);
CriterionResult determinism(std::uint64_t seed);
CriterionResult configuration_fidelity(std::uint64_t seed);

// Max |clipped - Monte-Carlo| over `trials` random rotated pairs.
double iou_monte_carlo_error(std::size_t trials, std::uint64_t seed,
                             std::size_t samples = 1000000);

// Runs every criterion in order, reporting each as it finishes.
std::vector<CriterionResult> run_all(
    std::uint64_t seed = kDefaultSeed,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace vpf::verify
