#include <doctest.h>

#include <filesystem>

#include "govkit/error.hpp"
#include "govkit/harness.hpp"
#include "govkit/verifier.hpp"

using namespace govkit;
using namespace govkit::harness;

TEST_CASE("call counts per topology size") {
  CHECK(scripted_calls(5) == 7);
  CHECK(scripted_calls(10) == 16);
  CHECK(scripted_calls(20) == 33);
  CHECK_THROWS_AS(scripted_calls(1), Error);
}

TEST_CASE("clean runs verify every call and replay") {
  for (std::size_t n : {5u, 10u, 20u}) {
    PipelineConfig cfg;
    cfg.agent_count = n;
    cfg.seed = 3;
    const auto r = run_clean_pipeline(cfg);
    CAPTURE(n);
    CHECK(r.governed_calls == scripted_calls(n));
    CHECK(r.ledger_entries == scripted_calls(n));
    CHECK(r.denials == 0);
    CHECK(r.detections.empty());
    CHECK(r.false_positive_count == 0);
    CHECK(r.audit.ok);
    CHECK(r.replays_verified == r.ledger_entries);
    CHECK(r.storage_bytes > 0);
  }
}

TEST_CASE("clean topology satisfies the propagation rule") {
  PipelineConfig cfg;
  cfg.agent_count = 10;
  const auto certs = topology_certificates(cfg);
  REQUIRE(certs.size() == cfg.agent_count + 2);
  CHECK(certs[0].is_root());
  for (std::size_t i = 1; i < certs.size(); ++i) {
    const auto parent = std::find_if(certs.begin(), certs.end(),
                                     [&](const cert::Certificate& c) { return c.id == certs[i].parent_id; });
    REQUIRE(parent != certs.end());
    CHECK(cert::constraint_leq(certs[i].constraints, parent->constraints));
  }
}

TEST_CASE("every scenario is detected at its expected layer without false positives") {
  PipelineConfig cfg;
  cfg.seed = 11;
  for (auto list : {std::span<const Scenario>(kStructuralScenarios), std::span<const Scenario>(kEndToEndScenarios)}) {
    for (auto s : list) {
      CAPTURE(to_string(s));
      const auto r = run_attack(cfg, s);
      CHECK(r.detected_as_expected());
      CHECK(r.false_positive_count == 0);
      CHECK(scenario_from_string(to_string(s)) == s);
    }
  }
  CHECK_THROWS_AS(scenario_from_string("S10"), Error);
}

TEST_CASE("baselines miss the end-to-end attacks the full overlay catches") {
  PipelineConfig cfg;
  const std::vector<Scenario> e2e(std::begin(kEndToEndScenarios), std::end(kEndToEndScenarios));
  const auto m = run_baseline_comparison(cfg, e2e);
  auto count = [&](GovernanceMode mode) {
    std::size_t n = 0;
    for (const auto& [s, hit] : m.at(mode)) n += hit;
    return n;
  };
  CHECK(count(GovernanceMode::none) == 0);
  CHECK(count(GovernanceMode::auth_only) == 0);
  CHECK(count(GovernanceMode::trace_only) == 0);
  CHECK(count(GovernanceMode::full) == 7);
}

TEST_CASE("runs are deterministic given the seed") {
  PipelineConfig cfg;
  cfg.seed = 42;
  const auto a = run_attack(cfg, Scenario::E2E2);
  const auto b = run_attack(cfg, Scenario::E2E2);
  REQUIRE(a.detections.size() == b.detections.size());
  for (std::size_t i = 0; i < a.detections.size(); ++i) {
    CHECK(a.detections[i].reason == b.detections[i].reason);
    CHECK(a.detections[i].seq == b.detections[i].seq);
  }
  CHECK(a.storage_bytes == b.storage_bytes);
}

TEST_CASE("file-backed runs and overhead rows") {
  const auto dir = std::filesystem::temp_directory_path() / "govkit-harness-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  PipelineConfig cfg;
  cfg.ledger_path = dir / "run.bin";
  cfg.durable = false;
  const auto r = run_clean_pipeline(cfg);
  CHECK(r.audit.ok);
  CHECK(std::filesystem::file_size(*cfg.ledger_path) == r.storage_bytes);

  const auto rows = measure_overhead({5, 10}, 2, false, dir);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ledger_entries == 7);
  CHECK(rows[1].ledger_entries == 16);
  for (const auto& row : rows) {
    CHECK(row.per_agent_ms > 0);
    CHECK(row.g3_share > 0);
    CHECK(row.g3_share < 1);
  }
  std::filesystem::remove_all(dir);
}
