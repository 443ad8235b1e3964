#pragma once

// Simulated coordinator/specialist pipeline with the governance overlay on
// every tool call, attack injection and overhead measurement. Runs are
// single-threaded and deterministic given the run seed.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "govkit/ledger.hpp"

namespace govkit::harness {

enum class Scenario {
  S1, S2, S3, S4, S5, S6, S7, S8, S9,
  E2E1, E2E2, E2E3, E2E4, E2E5, E2E6, E2E7,
};

inline constexpr Scenario kStructuralScenarios[] = {Scenario::S1, Scenario::S2, Scenario::S3,
                                                    Scenario::S4, Scenario::S5, Scenario::S6,
                                                    Scenario::S7, Scenario::S8, Scenario::S9};
inline constexpr Scenario kEndToEndScenarios[] = {Scenario::E2E1, Scenario::E2E2, Scenario::E2E3, Scenario::E2E4,
                                                  Scenario::E2E5, Scenario::E2E6, Scenario::E2E7};

std::string_view to_string(Scenario scenario);
Scenario scenario_from_string(std::string_view name);

enum class Layer { G1, G2, G3 };
std::string_view to_string(Layer layer);

struct ScenarioSpec {
  Scenario id;
  std::string_view name;
  std::string_view target;
  std::string_view injection;
  Layer expected_layer;
  std::string_view expected_reason;
};

const ScenarioSpec& scenario_spec(Scenario scenario);

// Which checks are active. `full` is the complete overlay; the others model
// the comparison baselines.
enum class GovernanceMode { none, auth_only, trace_only, full };
std::string_view to_string(GovernanceMode mode);

struct PipelineConfig {
  std::size_t agent_count = 5;
  std::uint64_t seed = 1;
  // Clock at the first call; call i happens i seconds later.
  std::uint64_t start_time = 1767225600000;
  // File-backed ledger when set; otherwise in memory.
  std::optional<std::filesystem::path> ledger_path;
  bool durable = true;
  // Simulated tool latency, excluded from governance timings.
  std::chrono::microseconds tool_latency{0};
};

// Number of governed calls a run of `agent_count` agents makes.
std::size_t scripted_calls(std::size_t agent_count);

struct LayerTimings {
  std::chrono::nanoseconds g1{0};
  std::chrono::nanoseconds g2{0};
  std::chrono::nanoseconds g3{0};

  std::chrono::nanoseconds total() const { return g1 + g2 + g3; }
};

struct Detection {
  Layer layer = Layer::G1;
  std::string reason;
  std::optional<std::uint64_t> seq;
  std::string subject;
  std::string detail;
  // Replay similarity behind a G2 detection.
  std::optional<double> char_match;
};

struct RunReport {
  std::optional<Scenario> scenario;
  GovernanceMode mode = GovernanceMode::full;
  std::size_t agent_count = 0;
  std::size_t governed_calls = 0;
  std::size_t ledger_entries = 0;
  std::size_t denials = 0;
  std::size_t storage_bytes = 0;
  LayerTimings timings;
  std::vector<Detection> detections;
  // Detections that do not match the scenario's expectation (all of them on
  // a clean run).
  std::size_t false_positive_count = 0;
  ledger::AuditReport audit;
  std::size_t replays_verified = 0;

  // True when some detection matches the scenario's expected layer and reason.
  bool detected_as_expected() const;
};

// Root, organization and agent certificates of the clean topology.
std::vector<cert::Certificate> topology_certificates(const PipelineConfig& config);

RunReport run_clean_pipeline(const PipelineConfig& config);
RunReport run_attack(const PipelineConfig& config, Scenario scenario, GovernanceMode mode = GovernanceMode::full);

// mode -> scenario -> detected as expected.
using BaselineMatrix = std::map<GovernanceMode, std::map<Scenario, bool>>;
BaselineMatrix run_baseline_comparison(const PipelineConfig& config, const std::vector<Scenario>& scenarios);

struct ScalingRow {
  std::size_t agent_count = 0;
  std::size_t ledger_entries = 0;
  LayerTimings mean;
  double per_agent_ms = 0;
  double g3_share = 0;
  std::size_t storage_bytes = 0;
};

// Mean per-run governance cost for each agent count over `repetitions`
// clean runs with the given ledger durability. File-backed runs use a fresh
// file under `scratch_dir`.
std::vector<ScalingRow> measure_overhead(const std::vector<std::size_t>& agent_counts, std::size_t repetitions,
                                         bool durable, const std::filesystem::path& scratch_dir);

}  // namespace govkit::harness
