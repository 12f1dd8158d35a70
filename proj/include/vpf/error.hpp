// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vpf {

enum class ErrorCode {
  EmptyGrid,
  ShapeMismatch,
  SpecMismatch,
  ConsistencyViolation,
  DegenerateBox,
  OutOfRange,
  InvalidArgument,
  Io,
  Format,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void check(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

inline void check(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace vpf
