// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "vpf/tensor.hpp"

namespace vpf::testing {

inline bool bitwise_equal(const FeatureMatrix& a, const FeatureMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(Real)) == 0;
}

inline double max_rel_error(std::span<const Real> got, std::span<const Real> want) {
  REQUIRE(got.size() == want.size());
  double worst = 0;
  for (std::size_t k = 0; k < got.size(); ++k) {
    worst = std::max(worst, std::abs(got[k] - want[k]) / std::max(1.0, std::abs(want[k])));
  }
  return worst;
}

}  // namespace vpf::testing
