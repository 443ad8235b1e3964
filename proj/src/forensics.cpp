#include "govkit/forensics.hpp"

#include <algorithm>

#include "govkit/error.hpp"

namespace govkit::ledger {

std::string_view to_string(ForensicStep step) {
  switch (step) {
    case ForensicStep::select: return "select";
    case ForensicStep::integrity: return "integrity";
    case ForensicStep::disclosure: return "disclosure";
    case ForensicStep::certificates: return "certificates";
    case ForensicStep::replay: return "replay";
  }
  return "unknown";
}

bool ForensicReport::ok() const {
  return std::all_of(steps.begin(), steps.end(), [](const StepResult& s) { return s.passed; });
}

std::optional<cert::Certificate> certificate_at(const CertificateHistory& certs, const std::string& id,
                                                cert::Timestamp at, const crypto::Digest& expected) {
  auto it = certs.find(id);
  if (it == certs.end()) return std::nullopt;
  for (const auto& c : it->second) {
    if (c.valid_at(at) && cert::certificate_hash(c) == expected) return c;
  }
  return std::nullopt;
}

ForensicReport forensic_reconstruct(const std::vector<InteractionRecord>& records, const std::vector<Edge>& path,
                                    const DisclosureMap& disclosures, const CertificateHistory& certs,
                                    const KeyDirectory& keys, const ReplayFn& replay) {
  ForensicReport report;
  auto mark = [&](ForensicStep s, std::uint64_t seq, std::string detail) {
    auto& st = report.steps[static_cast<std::size_t>(s)];
    if (st.passed) {
      st.passed = false;
      st.first_bad_seq = seq;
      st.detail = std::move(detail);
    }
  };

  // (1) Selection.
  std::vector<std::size_t> selected;
  report.steps[0].ran = true;
  std::size_t cursor = 0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    auto it = std::find_if(records.begin() + static_cast<std::ptrdiff_t>(cursor), records.end(),
                           [&](const InteractionRecord& r) {
                             return r.sender_id == path[j].first && r.receiver_id == path[j].second;
                           });
    if (it == records.end()) {
      auto& st = report.steps[0];
      st.passed = false;
      st.detail = "no record for edge " + std::to_string(j + 1) + " (" + path[j].first + " -> " + path[j].second + ")";
      break;
    }
    const auto index = static_cast<std::size_t>(it - records.begin());
    selected.push_back(index);
    report.selected_seqs.push_back(it->seq);
    cursor = index + 1;
  }
  if (selected.empty()) return report;

  // (2) Integrity of the prefix the selection depends on.
  report.steps[1].ran = true;
  const std::vector<InteractionRecord> prefix(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(selected.back() + 1));
  if (auto audit_report = audit(prefix, keys); !audit_report.ok) {
    mark(ForensicStep::integrity, *audit_report.first_bad_seq,
         std::string(to_string(*audit_report.failure)) + ": " + audit_report.detail);
  }

  // (3) Disclosures against commitments.
  report.steps[2].ran = true;
  std::vector<bool> input_ok(selected.size(), false);
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const auto& r = records[selected[k]];
    auto d = disclosures.find(r.seq);
    if (d == disclosures.end()) {
      throw Error(ErrorCode::missing_disclosure, "no disclosure for seq " + std::to_string(r.seq));
    }
    input_ok[k] = crypto::digest(d->second.input) == r.input_commitment;
    if (!input_ok[k]) {
      mark(ForensicStep::disclosure, r.seq, "disclosed input does not match η_in");
    } else if (crypto::digest(d->second.output) != r.output_commitment) {
      mark(ForensicStep::disclosure, r.seq, "disclosed output does not match η_out");
    }
  }

  // (4) Certificates in force at each interaction.
  report.steps[3].ran = true;
  std::vector<std::optional<cert::Certificate>> receiver_certs;
  for (auto index : selected) {
    const auto& r = records[index];
    if (!certificate_at(certs, r.sender_id, r.timestamp, r.sender_cert_hash)) {
      mark(ForensicStep::certificates, r.seq, "no certificate of '" + r.sender_id + "' matches ch_send");
    }
    receiver_certs.push_back(certificate_at(certs, r.receiver_id, r.timestamp, r.receiver_cert_hash));
    if (!receiver_certs.back()) {
      mark(ForensicStep::certificates, r.seq, "no certificate of '" + r.receiver_id + "' matches ch_recv");
    }
  }

  // (5) Replay of committed receivers on authenticated input.
  report.steps[4].ran = true;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const auto& r = records[selected[k]];
    const auto& c = receiver_certs[k];
    if (!c || !input_ok[k] || c->repro.level == cert::ReproLevel::none) continue;
    auto verdict = replay(*c, r, disclosures.at(r.seq));
    ReplayStepResult step{r.seq, r.receiver_id, verdict.verdict, std::nullopt};
    if (verdict.report) step.char_match = verdict.report->scores.char_match;
    report.replays.push_back(step);
    if (verdict.verdict == repro::ReplayOutcome::VIOLATION) {
      if (!report.first_divergent_seq) report.first_divergent_seq = r.seq;
      mark(ForensicStep::replay, r.seq, "replay of '" + r.receiver_id + "' diverges");
    }
  }
  return report;
}

}  // namespace govkit::ledger
