// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/weights.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

namespace vpf {

namespace {

std::uint64_t fnv1a(const std::string& s) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string encode_f32_base64(const std::vector<Real>& values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<unsigned char>(u >> (8 * b));
  }
  const std::size_t len =
      sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  std::string out(len, '\0');
  sodium_bin2base64(out.data(), len, bytes.data(), bytes.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(len - 1);  // drop the terminator
  return out;
}

std::vector<Real> decode_f32_base64(const std::string& text, std::size_t count) {
  std::vector<unsigned char> bytes(count * 4 + 3);
  std::size_t written = 0;
  const int rc = sodium_base642bin(bytes.data(), bytes.size(), text.data(), text.size(),
                                   " \n\r\t", &written, nullptr,
                                   sodium_base64_VARIANT_ORIGINAL);
  check(rc == 0, ErrorCode::Format, "malformed base64 tensor payload");
  check(written == count * 4, ErrorCode::Format,
        "base64 tensor payload length does not match shape");
  std::vector<Real> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    float f;
    std::memcpy(&f, &u, 4);
    values[i] = f;
  }
  return values;
}

}  // namespace

std::size_t NamedTensor::element_count() const noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

void WeightStore::set(const std::string& name, NamedTensor tensor) {
  check(tensor.values.size() == tensor.element_count(), ErrorCode::ShapeMismatch,
        "tensor '" + name + "' value count does not match its shape");
  tensors_[name] = std::move(tensor);
}

const NamedTensor& WeightStore::get(const std::string& name) const {
  const auto it = tensors_.find(name);
  check(it != tensors_.end(), ErrorCode::Config, "weight tensor '" + name + "' not found");
  return it->second;
}

nlohmann::json WeightStore::to_json(std::size_t inline_limit) const {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, t] : tensors_) {
    nlohmann::json entry;
    entry["shape"] = t.shape;
    if (t.values.size() <= inline_limit) {
      entry["values"] = t.values;
    } else {
      entry["base64"] = encode_f32_base64(t.values);
    }
    tensors[name] = std::move(entry);
  }
  return nlohmann::json{{"tensors", std::move(tensors)}};
}

WeightStore WeightStore::from_json(const nlohmann::json& j) {
  check(j.is_object() && j.contains("tensors") && j.at("tensors").is_object(),
        ErrorCode::Format, "weight manifest must be an object with a 'tensors' object");
  for (const auto& [key, _] : j.items()) {
    check(key == "tensors", ErrorCode::Format, "unknown manifest key '" + key + "'");
  }
  WeightStore store;
  for (const auto& [name, entry] : j.at("tensors").items()) {
    check(entry.is_object() && entry.contains("shape"), ErrorCode::Format,
          "tensor '" + name + "' lacks a shape");
    NamedTensor t;
    try {
      t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::Format, "tensor '" + name + "' has a malformed shape");
    }
    for (auto d : t.shape) {
      check(d > 0, ErrorCode::Format, "tensor '" + name + "' has a non-positive dimension");
    }
    const bool has_values = entry.contains("values");
    const bool has_b64 = entry.contains("base64");
    check(has_values != has_b64, ErrorCode::Format,
          "tensor '" + name + "' needs exactly one of 'values' or 'base64'");
    if (has_values) {
      try {
        t.values = entry.at("values").get<std::vector<Real>>();
      } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::Format, "tensor '" + name + "' has non-numeric values");
      }
    } else {
      check(entry.at("base64").is_string(), ErrorCode::Format,
            "tensor '" + name + "' base64 payload must be a string");
      t.values = decode_f32_base64(entry.at("base64").get<std::string>(), t.element_count());
    }
    for (Real v : t.values) {
      check(std::isfinite(v), ErrorCode::Format, "tensor '" + name + "' has non-finite values");
    }
    check(t.values.size() == t.element_count(), ErrorCode::ShapeMismatch,
          "tensor '" + name + "' value count does not match its shape");
    store.tensors_[name] = std::move(t);
  }
  return store;
}

std::vector<Real> ParameterSource::take(const std::string& name,
                                        const std::vector<std::int64_t>& shape, Init init,
                                        std::int64_t fan_in) {
  NamedTensor t;
  t.shape = shape;
  if (manifest_ != nullptr) {
    check(manifest_->contains(name), ErrorCode::Config,
          "weight manifest is missing tensor '" + name + "'");
    const auto& loaded = manifest_->get(name);
    check(loaded.shape == shape, ErrorCode::ShapeMismatch,
          "weight tensor '" + name + "' has the wrong shape");
    t.values = loaded.values;
  } else {
    const std::size_t n = t.element_count();
    t.values.assign(n, 0.0);
    if (init == Init::Ones) {
      t.values.assign(n, 1.0);
    } else if (init != Init::Zeros) {
      const std::uint64_t h = fnv1a(name);
      std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                        static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
      std::mt19937_64 gen(seq);
      const double fan = static_cast<double>(std::max<std::int64_t>(fan_in, 1));
      const double bound =
          init == Init::HeUniform ? std::sqrt(6.0 / fan) : 0.1 / std::sqrt(fan);
      for (auto& v : t.values) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        // f32-representable so base64 manifests reproduce the model exactly
        v = static_cast<float>((2.0 * u - 1.0) * bound);
      }
    }
  }
  consumed_.insert(name);
  auto values = t.values;
  recorded_.set(name, std::move(t));
  return values;
}

void ParameterSource::require_manifest_consumed() const {
  if (manifest_ == nullptr) return;
  for (const auto& [name, _] : manifest_->tensors()) {
    check(consumed_.count(name) != 0, ErrorCode::Config,
          "weight manifest holds unexpected tensor '" + name + "'");
  }
}

}  // namespace vpf
