// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include "vpf/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

namespace vpf {

namespace {

constexpr char kCloudMagic[4] = {'V', 'P', 'F', '1'};
constexpr char kDumpMagic[4] = {'V', 'P', 'F', 'T'};

class Writer {
 public:
  void magic(const char (&m)[4]) { bytes_.insert(bytes_.end(), m, m + 4); }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f32(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    u32(u);
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::Format, std::string("truncated ") + what);
  }
  bool magic(const char (&m)[4]) {
    need(4, "magic");
    const bool ok = std::memcmp(bytes_.data() + pos_, m, 4) == 0;
    pos_ += 4;
    return ok;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) {
    const std::uint32_t u = u32(what);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
  }
  std::string raw(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <std::size_t Dim>
TensorRecord sparse_record(const std::string& name, const SparseTensor<Dim>& t) {
  TensorRecord r;
  r.name = name;
  r.stride = t.stride;
  r.extents.assign(t.extents.begin(), t.extents.end());
  r.channels = t.channels();
  r.coords.reserve(t.size() * Dim);
  for (const auto& c : t.coords) {
    for (auto v : c) r.coords.push_back(static_cast<std::uint32_t>(v));
  }
  r.features.reserve(t.features.data().size());
  for (Real v : t.features.data()) r.features.push_back(static_cast<float>(v));
  return r;
}

}  // namespace

std::vector<std::uint8_t> encode_cloud(const PointCloud& cloud) {
  check(cloud.size() <= 0xffffffffu, ErrorCode::InvalidArgument, "too many points for VPF1");
  Writer w;
  w.magic(kCloudMagic);
  w.u32(static_cast<std::uint32_t>(cloud.size()));
  for (const auto& p : cloud.points) {
    w.f32(static_cast<float>(p.x));
    w.f32(static_cast<float>(p.y));
    w.f32(static_cast<float>(p.z));
    w.f32(static_cast<float>(p.intensity));
  }
  return w.take();
}

PointCloud decode_cloud(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  check(r.magic(kCloudMagic), ErrorCode::Format, "not a VPF1 point cloud (bad magic bytes)");
  const std::uint32_t n = r.u32("point count");
  check(r.remaining() == static_cast<std::size_t>(n) * 16, ErrorCode::Format,
        "VPF1 payload size does not match the point count");
  PointCloud cloud;
  cloud.points.resize(n);
  for (auto& p : cloud.points) {
    p.x = r.f32("point");
    p.y = r.f32("point");
    p.z = r.f32("point");
    p.intensity = r.f32("point");
    check(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
              std::isfinite(p.intensity),
          ErrorCode::Format, "VPF1 point cloud contains a non-finite value");
  }
  return cloud;
}

PointCloud read_cloud(const std::filesystem::path& path) {
  return decode_cloud(read_file(path));
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  write_file_atomic(path, encode_cloud(cloud));
}

TensorRecord to_record(const std::string& name, const SparseTensor2D& t) {
  return sparse_record(name, t);
}

TensorRecord to_record(const std::string& name, const SparseTensor3D& t) {
  return sparse_record(name, t);
}

TensorRecord to_record(const std::string& name, const DenseFeatureMap& m) {
  TensorRecord r;
  r.name = name;
  r.stride = m.stride;
  r.extents = {m.rows, m.cols};
  r.channels = static_cast<std::size_t>(m.channels);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      r.coords.push_back(static_cast<std::uint32_t>(i));
      r.coords.push_back(static_cast<std::uint32_t>(j));
    }
  }
  r.features.reserve(m.values.size());
  for (Real v : m.values) r.features.push_back(static_cast<float>(v));
  return r;
}

std::vector<TensorRecord> forward_records(const ForwardResult& result, bool intermediates) {
  std::vector<TensorRecord> out;
  if (intermediates) {
    for (std::size_t s = 0; s < result.steps.size(); ++s) {
      const std::string prefix = "encoder." + std::to_string(s);
      out.push_back(to_record(prefix + ".voxels", result.steps[s].voxels));
      out.push_back(to_record(prefix + ".pillars", result.steps[s].pillars));
    }
  }
  if (result.dense) out.push_back(to_record("readout", *result.dense));
  if (result.sparse) out.push_back(to_record("readout", *result.sparse));
  return out;
}

std::vector<std::uint8_t> encode_dump(const std::vector<TensorRecord>& records) {
  Writer w;
  w.magic(kDumpMagic);
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    check(!r.extents.empty() && r.coords.size() % r.extents.size() == 0 &&
              r.features.size() == r.count() * r.channels,
          ErrorCode::ShapeMismatch, "tensor record '" + r.name + "' is inconsistent");
    const nlohmann::json header{{"name", r.name},
                                {"stride", r.stride},
                                {"extents", r.extents},
                                {"channels", r.channels},
                                {"count", r.count()}};
    const std::string text = header.dump();
    w.u32(static_cast<std::uint32_t>(text.size()));
    w.raw(text);
    for (auto c : r.coords) w.u32(c);
    for (auto f : r.features) w.f32(f);
  }
  return w.take();
}

std::vector<TensorRecord> decode_dump(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  check(r.magic(kDumpMagic), ErrorCode::Format, "not a VPFT tensor dump (bad magic bytes)");
  const std::uint32_t n = r.u32("record count");
  std::vector<TensorRecord> out;
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t len = r.u32("header length");
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(r.raw(len, "header"));
    } catch (const nlohmann::json::parse_error&) {
      fail(ErrorCode::Format, "tensor dump header is not valid JSON");
    }
    TensorRecord rec;
    std::size_t count = 0;
    try {
      rec.name = header.at("name").get<std::string>();
      rec.stride = header.at("stride").get<int>();
      rec.extents = header.at("extents").get<std::vector<std::int32_t>>();
      rec.channels = header.at("channels").get<std::size_t>();
      count = header.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::Format, "tensor dump header lacks required fields");
    }
    check(!rec.extents.empty(), ErrorCode::Format, "tensor dump header has no extents");
    const std::size_t n_coords = count * rec.extents.size();
    const std::size_t n_feats = count * rec.channels;
    r.need((n_coords + n_feats) * 4, "tensor payload");
    rec.coords.resize(n_coords);
    for (auto& c : rec.coords) c = r.u32("coords");
    rec.features.resize(n_feats);
    for (auto& f : rec.features) f = r.f32("features");
    out.push_back(std::move(rec));
  }
  check(r.remaining() == 0, ErrorCode::Format, "trailing bytes after tensor dump");
  return out;
}

std::vector<TensorRecord> read_dump(const std::filesystem::path& path) {
  return decode_dump(read_file(path));
}

void write_dump(const std::filesystem::path& path, const std::vector<TensorRecord>& records) {
  write_file_atomic(path, encode_dump(records));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check(in.good(), ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  check(!in.bad(), ErrorCode::Io, "error reading '" + path.string() + "'");
  return bytes;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Format, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    check(out.good(), ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    check(out.good(), ErrorCode::Io, "error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move output into place at '" + path.string() + "'");
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace vpf
