// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include "helpers.hpp"
#include "vpf/generators.hpp"
#include "vpf/io.hpp"

using namespace vpf;

namespace {

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "vpf_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("VPF1 clouds round-trip as f32") {
  PointCloud c{{{1.5, -2.25, 0.125, 0.5}, {0.1, 0.2, 0.3, 0.4}}};
  const auto bytes = encode_cloud(c);
  CHECK(bytes.size() == 8 + 2 * 16);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "VPF1");
  const auto back = decode_cloud(bytes);
  REQUIRE(back.size() == 2);
  CHECK(back.points[0] == c.points[0]);
  CHECK(back.points[1].x == static_cast<double>(0.1f));

  const auto path = scratch("cloud.vpf");
  write_cloud(path, c);
  CHECK(read_cloud(path).points[0] == c.points[0]);
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST_CASE("malformed clouds are rejected with Format") {
  auto bytes = encode_cloud(PointCloud{{{1, 2, 3, 4}}});
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { decode_cloud(bad_magic); }) == ErrorCode::Format);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK(code_of([&] { decode_cloud(truncated); }) == ErrorCode::Format);
  CHECK(code_of([&] { decode_cloud(std::vector<std::uint8_t>{'V', 'P'}); }) == ErrorCode::Format);
  auto nan = encode_cloud(PointCloud{{{NAN, 2, 3, 4}}});
  CHECK(code_of([&] { decode_cloud(nan); }) == ErrorCode::Format);
  CHECK(code_of([&] { read_cloud(scratch("does-not-exist.vpf")); }) == ErrorCode::Io);
}

TEST_CASE("tensor dumps round-trip with headers") {
  gen::Rng rng(71);
  const auto v = gen::sparse_tensor<3>(rng, {5, 6, 3}, 0.3, 4, 2);
  const auto p = gen::sparse_tensor<2>(rng, {5, 6}, 0.3, 2, 2);
  const auto records = std::vector<TensorRecord>{to_record("v", v), to_record("p", p)};
  const auto back = decode_dump(encode_dump(records));
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "v");
  CHECK(back[0].stride == 2);
  CHECK(back[0].extents == std::vector<std::int32_t>{5, 6, 3});
  CHECK(back[0].channels == 4);
  CHECK(back[0].count() == v.size());
  CHECK(back[0].coords == records[0].coords);
  CHECK(back[0].features == records[0].features);
  CHECK(back[1].extents.size() == 2);

  DenseFeatureMap m(2, 3, 2, 8);
  const auto dense = to_record("m", m);
  CHECK(dense.count() == 6);
  CHECK(dense.coords[2] == 0);
  CHECK(dense.coords[3] == 1);
}

TEST_CASE("malformed dumps are rejected") {
  gen::Rng rng(72);
  auto bytes = encode_dump({to_record("t", gen::sparse_tensor<2>(rng, {4, 4}, 0.5, 1))});
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(code_of([&] { decode_dump(trailing); }) == ErrorCode::Format);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  CHECK(code_of([&] { decode_dump(truncated); }) == ErrorCode::Format);
  auto magic = bytes;
  magic[3] = '1';
  CHECK(code_of([&] { decode_dump(magic); }) == ErrorCode::Format);
}

TEST_CASE("JSON files report parse errors as Format") {
  const auto path = scratch("broken.json");
  write_file_atomic(path, std::string_view("{\"a\": "));
  CHECK(code_of([&] { read_json(path); }) == ErrorCode::Format);
}
