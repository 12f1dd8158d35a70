// Copyright 2026 The VPF Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "vpf/weights.hpp"

using namespace vpf;

TEST_CASE("manifests round-trip through inline and base64 payloads") {
  ParameterSource src(5);
  src.take("small", {2, 3}, ParameterSource::Init::HeUniform, 3);
  src.take("large", {9, 16, 8}, ParameterSource::Init::HeUniform, 144);
  src.take("ones", {4}, ParameterSource::Init::Ones);
  const auto j = src.recorded().to_json();
  CHECK(j["tensors"]["small"].contains("values"));
  CHECK(j["tensors"]["large"].contains("base64"));
  const auto back = WeightStore::from_json(j);
  CHECK(back.tensors() == src.recorded().tensors());
  CHECK(WeightStore::from_json(nlohmann::json::parse(j.dump())).tensors() == back.tensors());
}

TEST_CASE("seeded initialisation is deterministic, bounded and f32-exact") {
  ParameterSource a(17);
  ParameterSource b(17);
  ParameterSource c(18);
  const auto wa = a.take("w", {27, 4, 8}, ParameterSource::Init::HeUniform, 108);
  const auto wb = b.take("w", {27, 4, 8}, ParameterSource::Init::HeUniform, 108);
  const auto wc = c.take("w", {27, 4, 8}, ParameterSource::Init::HeUniform, 108);
  CHECK(wa == wb);
  CHECK(wa != wc);
  const double bound = std::sqrt(6.0 / 108);
  for (double v : wa) {
    CHECK(std::abs(v) <= bound);
    CHECK(static_cast<double>(static_cast<float>(v)) == v);
  }
  ParameterSource d(17);
  d.take("other", {3}, ParameterSource::Init::Zeros);
  CHECK(d.take("w", {27, 4, 8}, ParameterSource::Init::HeUniform, 108) == wa);
}

TEST_CASE("manifest-backed sources demand matching names and shapes") {
  WeightStore store;
  store.set("a", {{2}, {1.0, 2.0}});
  ParameterSource src(0, &store);
  CHECK(src.take("a", {2}, ParameterSource::Init::Zeros) == std::vector<Real>{1.0, 2.0});
  CHECK_NOTHROW(src.require_manifest_consumed());
  ParameterSource wrong_shape(0, &store);
  CHECK_THROWS_AS(wrong_shape.take("a", {3}, ParameterSource::Init::Zeros), Error);
  ParameterSource absent(0, &store);
  CHECK_THROWS_AS(absent.take("b", {2}, ParameterSource::Init::Zeros), Error);
  ParameterSource unused(0, &store);
  CHECK_THROWS_AS(unused.require_manifest_consumed(), Error);
}

TEST_CASE("manifest parsing is strict") {
  using nlohmann::json;
  auto bad = [](const json& j) {
    try {
      WeightStore::from_json(j);
      return false;
    } catch (const Error&) {
      return true;
    }
  };
  CHECK(bad(json::array()));
  CHECK(bad(json{{"tensors", json::object()}, {"extra", 1}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {2}}}}}}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {2}}, {"values", {1, 2}}, {"base64", "AAAA"}}}}}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {3}}, {"values", {1, 2}}}}}}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {0}}, {"values", json::array()}}}}}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {1}}, {"base64", "!!!"}}}}}}));
  CHECK(bad(json{{"tensors", {{"t", {{"shape", {2}}, {"base64", "AACAPw=="}}}}}}));
  CHECK_FALSE(bad(json{{"tensors", {{"t", {{"shape", {1}}, {"base64", "AACAPw=="}}}}}}));
  CHECK(WeightStore::from_json(json{{"tensors", {{"t", {{"shape", {1}}, {"base64", "AACAPw=="}}}}}})
            .get("t")
            .values == std::vector<Real>{1.0});
}
