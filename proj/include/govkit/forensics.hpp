#pragma once

// Post-hoc reconstruction of an execution path from the ledger, disclosed
// content and the certificates in force at each interaction.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "govkit/certificates.hpp"
#include "govkit/ledger.hpp"
#include "govkit/replay.hpp"

namespace govkit::ledger {

// Content a cooperating party reveals for one record.
struct Disclosure {
  std::string input;
  std::string output;
};

using DisclosureMap = std::map<std::uint64_t, Disclosure>;

// Every certificate ever issued per agent id; the one valid at a record's
// timestamp is the one that record must bind to.
using CertificateHistory = std::map<std::string, std::vector<cert::Certificate>>;

// Replays the receiver of `record` (certified by `receiver_cert`) on the
// disclosed input.
using ReplayFn = std::function<repro::ReplayVerdict(const cert::Certificate& receiver_cert,
                                                    const InteractionRecord& record, const Disclosure& disclosure)>;

enum class ForensicStep { select = 0, integrity = 1, disclosure = 2, certificates = 3, replay = 4 };
std::string_view to_string(ForensicStep step);

struct StepResult {
  bool passed = true;
  bool ran = false;
  std::optional<std::uint64_t> first_bad_seq;
  std::string detail;
};

struct ReplayStepResult {
  std::uint64_t seq = 0;
  std::string agent_id;
  repro::ReplayOutcome verdict = repro::ReplayOutcome::INCONCLUSIVE;
  std::optional<double> char_match;
};

struct ForensicReport {
  std::vector<std::uint64_t> selected_seqs;
  std::array<StepResult, 5> steps;
  std::vector<ReplayStepResult> replays;
  std::optional<std::uint64_t> first_divergent_seq;

  const StepResult& step(ForensicStep s) const { return steps[static_cast<std::size_t>(s)]; }
  bool ok() const;
};

// (1) selects, for each edge in order, the first record after the previous
// selection; (2) audits the ledger prefix through the last selected record;
// (3) checks disclosed input/output against η_in/η_out; (4) checks that
// ch_send/ch_recv hash certificates valid at the record time; (5) replays
// every receiver whose certificate commits to ρ != none. Later steps only use
// the records step 1 found.
//
// Throws Error(missing_disclosure) when a selected record has no disclosure.
ForensicReport forensic_reconstruct(const std::vector<InteractionRecord>& records, const std::vector<Edge>& path,
                                    const DisclosureMap& disclosures, const CertificateHistory& certs,
                                    const KeyDirectory& keys, const ReplayFn& replay);

// Certificate for `id` valid at `at` whose hash is `expected`, if any.
std::optional<cert::Certificate> certificate_at(const CertificateHistory& certs, const std::string& id,
                                                cert::Timestamp at, const crypto::Digest& expected);

}  // namespace govkit::ledger
