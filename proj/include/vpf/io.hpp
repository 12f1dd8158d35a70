// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vpf/backbone.hpp"
#include "vpf/grid.hpp"

namespace vpf {

// "VPF1" | u32 N | N x (f32 x, y, z, intensity), little-endian.
std::vector<std::uint8_t> encode_cloud(const PointCloud& cloud);
PointCloud decode_cloud(std::span<const std::uint8_t> bytes);
PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

// One tensor of a dump file. Coordinates are stored as u32, features as f32.
struct TensorRecord {
  std::string name;
  int stride = 1;
  std::vector<std::int32_t> extents;  // 2 or 3 entries
  std::size_t channels = 0;
  std::vector<std::uint32_t> coords;  // count x extents.size()
  std::vector<float> features;        // count x channels

  std::size_t count() const noexcept {
    return extents.empty() ? 0 : coords.size() / extents.size();
  }
};

TensorRecord to_record(const std::string& name, const SparseTensor2D& t);
TensorRecord to_record(const std::string& name, const SparseTensor3D& t);
// Every lattice site is listed, in row-major order.
TensorRecord to_record(const std::string& name, const DenseFeatureMap& m);

// Records "encoder.{s}.voxels" and "encoder.{s}.pillars" for every step
// when `intermediates` is set, then "readout".
std::vector<TensorRecord> forward_records(const ForwardResult& result, bool intermediates);

// "VPFT" | u32 record count | records. Each record: u32 header length, a
// JSON header {"name","stride","extents","channels","count"}, coords, then
// features; all little-endian.
std::vector<std::uint8_t> encode_dump(const std::vector<TensorRecord>& records);
std::vector<TensorRecord> decode_dump(std::span<const std::uint8_t> bytes);
std::vector<TensorRecord> read_dump(const std::filesystem::path& path);
void write_dump(const std::filesystem::path& path, const std::vector<TensorRecord>& records);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace vpf
