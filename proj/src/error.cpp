// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/error.hpp"

namespace vpf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::ConsistencyViolation: return "ConsistencyViolation";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace vpf
