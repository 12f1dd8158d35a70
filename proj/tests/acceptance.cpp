// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

// Runs every acceptance criterion and prints one line per criterion.

#include <cstdio>
#include <cstdlib>

#include "vpf/verify.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed =
      argc > 1 ? std::strtoull(argv[1], nullptr, 10) : vpf::verify::kDefaultSeed;
  int failures = 0;
  vpf::verify::run_all(seed, [&](const vpf::verify::CriterionResult& r) {
    std::printf("[%s] AC%d %s: %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    failures += r.passed ? 0 : 1;
  });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
