#include "govkit/replay.hpp"

#include "govkit/error.hpp"

namespace govkit::repro {

std::string_view to_string(ReplayOutcome outcome) {
  switch (outcome) {
    case ReplayOutcome::VERIFIED: return "VERIFIED";
    case ReplayOutcome::VIOLATION: return "VIOLATION";
    case ReplayOutcome::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

ReplayVerdict replay_verify(const cert::Certificate& cert, const ledger::InteractionRecord& record,
                            std::string_view original_output, ByteView disclosed_input,
                            ModelExecutor& executor, const Thresholds& ensemble_thresholds) {
  if (crypto::digest(disclosed_input) != record.input_commitment) {
    throw Error(ErrorCode::input_commitment_mismatch,
                "disclosed input for seq " + std::to_string(record.seq) + " does not match its commitment");
  }
  if (executor.model() != cert.model) {
    throw Error(ErrorCode::invalid_argument, "executor model '" + executor.model().model_id +
                                                 "' is not the certified model '" + cert.model.model_id + "'");
  }
  ReplayVerdict out;
  if (cert.repro.level == cert::ReproLevel::none) return out;

  out.replay_output = executor.execute(disclosed_input, record.anchor.seed, cert.repro.config);
  out.report = ensemble_evaluate(original_output, out.replay_output, ensemble_thresholds);
  if (cert.repro.level == cert::ReproLevel::full) {
    out.verdict = out.replay_output == original_output ? ReplayOutcome::VERIFIED : ReplayOutcome::VIOLATION;
    return out;
  }
  out.theta = cert.repro.theta();
  if (!out.theta) {
    throw Error(ErrorCode::invalid_certificate, "statistical commitment of '" + cert.id + "' has no theta");
  }
  out.verdict = out.report->scores.char_match >= *out.theta ? ReplayOutcome::VERIFIED : ReplayOutcome::VIOLATION;
  return out;
}

}  // namespace govkit::repro
