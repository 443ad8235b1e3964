#pragma once

// Replay verification of a recorded interaction against its certificate's
// reproducibility commitment.

#include <optional>
#include <string>
#include <string_view>

#include "govkit/certificates.hpp"
#include "govkit/executors.hpp"
#include "govkit/ledger.hpp"
#include "govkit/metrics.hpp"

namespace govkit::repro {

enum class ReplayOutcome { VERIFIED, VIOLATION, INCONCLUSIVE };
std::string_view to_string(ReplayOutcome outcome);

struct ReplayVerdict {
  ReplayOutcome verdict = ReplayOutcome::INCONCLUSIVE;
  std::optional<SimilarityReport> report;
  // Gate value used for statistical commitments.
  std::optional<double> theta;
  std::string replay_output;
};

// Re-executes the certified model on the disclosed input with the recorded
// seed and the certificate's replay config, then compares with
// `original_output`: ρ = none is INCONCLUSIVE, full requires byte equality,
// statistical requires char_match >= θ. The full report is attached whenever
// a replay ran.
//
// Throws Error(input_commitment_mismatch) when digest(disclosed_input) is not
// the record's input commitment, and Error(invalid_argument) when the
// executor does not present the certificate's model binding.
ReplayVerdict replay_verify(const cert::Certificate& cert, const ledger::InteractionRecord& record,
                            std::string_view original_output, ByteView disclosed_input,
                            ModelExecutor& executor, const Thresholds& ensemble_thresholds = {});

}  // namespace govkit::repro
