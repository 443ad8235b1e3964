#include <doctest.h>

#include "govkit/error.hpp"
#include "govkit/json_io.hpp"
#include "support.hpp"

using namespace govkit;
using namespace govkit::json_io;
using testsupport::oracles;

namespace {

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("manifest file hashes to the independent value") {
  const auto& o = oracles()["manifest"];
  const auto m = manifest_from_json(Json::parse(o["manifest"].dump()));
  CHECK(cert::manifest_hash(m).hex() == o["manifest_hash"].get<std::string>());
  // Round trip through the normalized JSON view.
  CHECK(manifest_from_json(to_json(m)) == m);
}

TEST_CASE("malformed manifests") {
  for (const char* text : {R"({})", R"({"entries": 3})", R"({"entries": [{"sid": "a", "ver": "1"}]})",
                           R"({"entries": [{"sid": "a", "ver": "1", "h": "zz", "scopes": []}]})",
                           R"({"entries": [{"sid": "a", "ver": "1", "api_schema": "s", "scopes": [1]}]})"}) {
    CAPTURE(text);
    CHECK(code_of([&] { manifest_from_json(parse(text)); }) == ErrorCode::malformed);
  }
  CHECK(code_of([] { parse("{not json"); }) == ErrorCode::malformed);
}

TEST_CASE("key files round trip and reject inconsistent keys") {
  KeyFile k{"agent", testsupport::key("agent")};
  const auto back = key_from_json(to_json(k));
  CHECK(back.id == "agent");
  CHECK(back.keys.public_key == k.keys.public_key);
  auto j = to_json(k);
  j["public_key"] = testsupport::key("other").public_key.hex();
  CHECK(code_of([&] { key_from_json(j); }) == ErrorCode::malformed);
  j = to_json(k);
  j["secret_seed"] = "abcd";
  CHECK(code_of([&] { key_from_json(j); }) == ErrorCode::malformed);
}

TEST_CASE("revocations and labelled pairs") {
  const auto reg = revocations_from_jsonl("{\"cert_id\":\"a\",\"revoked_at\":5}\n\n{\"cert_id\":\"a\",\"revoked_at\":3}\n");
  CHECK(reg.revoked_at("a") == 3u);
  CHECK(revocations_to_jsonl(reg) == "{\"cert_id\":\"a\",\"revoked_at\":3}\n");
  const auto pairs = pairs_from_jsonl(
      "{\"text_a\":\"x\",\"text_b\":\"y\",\"label\":true}\n"
      "{\"text_a\":\"x\",\"text_b\":\"y\",\"label\":0}\n"
      "{\"text_a\":\"x\",\"text_b\":\"y\",\"label\":\"same_model\"}\n");
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].label);
  CHECK_FALSE(pairs[1].label);
  CHECK(pairs[2].label);
  CHECK(code_of([] { pairs_from_jsonl("{\"text_a\":\"x\",\"text_b\":\"y\",\"label\":2}"); }) == ErrorCode::malformed);
}

TEST_CASE("subject files and certificate views") {
  const auto subject = subject_from_json(parse(R"({
    "id": "research-1",
    "model": {"provider": "mockai", "model_id": "searcher-m", "model_ver": "2025-01"},
    "constraints": {"max_tier": "T2", "max_depth": 1, "allowed_models": ["searcher-m"], "max_rate": "2.5"},
    "repro": {"level": "statistical", "config": {"theta": "0.85"}},
    "governance_level": "L2_sampled", "node_type": "AG",
    "not_before": 1, "not_after": 2})"));
  CHECK(subject.constraints.max_rate == cert::Rate::make(5, 2));
  CHECK(subject.repro.theta() == doctest::Approx(0.85));
  CHECK(subject.constraints.max_tier == cert::Tier::T2);
  CHECK(code_of([] { subject_from_json(parse(R"({"id": "x"})")); }) == ErrorCode::malformed);

  testsupport::Pki pki;
  const auto j = to_json(pki.leaf);
  CHECK(j["id"] == "leaf");
  CHECK(j["parent_id"] == "agent");
}
