// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vpf/tensor.hpp"

namespace vpf {

struct NamedTensor {
  std::vector<std::int64_t> shape;
  std::vector<Real> values;

  std::size_t element_count() const noexcept;
  bool operator==(const NamedTensor&) const = default;
};

// name -> tensor. Serialized as
//   {"tensors": {"<name>": {"shape": [...], "values": [...]}}}
// or with "base64" (little-endian f32) in place of "values".
class WeightStore {
 public:
  void set(const std::string& name, NamedTensor tensor);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const NamedTensor& get(const std::string& name) const;
  const std::map<std::string, NamedTensor>& tensors() const noexcept { return tensors_; }
  std::size_t size() const noexcept { return tensors_.size(); }

  // Tensors with at most `inline_limit` elements are written as JSON arrays,
  // larger ones as base64 f32.
  nlohmann::json to_json(std::size_t inline_limit = 64) const;
  static WeightStore from_json(const nlohmann::json& j);

 private:
  std::map<std::string, NamedTensor> tensors_;
};

// Hands out parameters by name: taken from a loaded manifest when present
// (shape-checked), otherwise drawn from a generator seeded by (seed, name),
// so every tensor is reproducible independent of request order. Every
// handed-out tensor is recorded for export.
class ParameterSource {
 public:
  enum class Init { HeUniform, Zeros, Ones, SmallUniform };

  explicit ParameterSource(std::uint64_t seed, const WeightStore* manifest = nullptr)
      : seed_(seed), manifest_(manifest) {}

  std::vector<Real> take(const std::string& name, const std::vector<std::int64_t>& shape,
                         Init init, std::int64_t fan_in = 1);

  // Throws Config if the manifest holds names that were never requested.
  void require_manifest_consumed() const;

  const WeightStore& recorded() const noexcept { return recorded_; }

 private:
  std::uint64_t seed_;
  const WeightStore* manifest_;
  std::set<std::string> consumed_;
  WeightStore recorded_;
};

}  // namespace vpf
