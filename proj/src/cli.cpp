#include "govkit/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "govkit/budget.hpp"
#include "govkit/calibration.hpp"
#include "govkit/depth.hpp"
#include "govkit/error.hpp"
#include "govkit/executors.hpp"
#include "govkit/harness.hpp"
#include "govkit/json_io.hpp"
#include "govkit/ledger.hpp"
#include "govkit/replay.hpp"
#include "govkit/verifier.hpp"

namespace govkit::cli {

namespace {

namespace fs = std::filesystem;
using json_io::Json;

// Usage and input problems exit 2; governance refusals exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::type_constraint:
    case ErrorCode::constraint_violation:
    case ErrorCode::depth_exhausted:
    case ErrorCode::expired_issuer:
    case ErrorCode::key_mismatch:
    case ErrorCode::input_commitment_mismatch:
      return 1;
    default:
      return 2;
  }
}

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out += prefix + ": " + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

class Lock {
 public:
  explicit Lock(const fs::path& ledger) {
    const auto path = ledger.string() + ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      throw Error(ErrorCode::storage_failure, "cannot lock " + path);
    }
  }
  Lock(const Lock&) = delete;
  Lock& operator=(const Lock&) = delete;
  ~Lock() {
    if (fd_ >= 0) ::close(fd_);  // releases the lock
  }

 private:
  int fd_ = -1;
};

struct Context {
  bool json = false;
  std::optional<std::uint64_t> now_flag;
  std::optional<fs::path> home;

  std::uint64_t now() const {
    if (now_flag) return *now_flag;
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
            .count());
  }

  fs::path home_path(const std::string& flag, const std::string& value, const char* file) const {
    if (!value.empty()) return value;
    if (home) return *home / file;
    throw UsageError(flag + " is required when GOVKIT_HOME is not set");
  }
};

struct Output {
  Json payload;
  int exit_code = 0;
  std::string text;  // plain-text override for non-JSON mode
};

std::vector<cert::Certificate> load_certs(const std::vector<std::string>& paths) {
  std::vector<cert::Certificate> out;
  for (const auto& p : paths) {
    auto certs = cert::all_from_pem(json_io::read_file(p));
    if (certs.empty()) throw Error(ErrorCode::malformed, p + " holds no certificate");
    out.insert(out.end(), certs.begin(), certs.end());
  }
  return out;
}

cert::Certificate load_cert(const std::string& path) { return cert::from_pem(json_io::read_file(path)); }

json_io::KeyFile load_key(const std::string& path) {
  return json_io::key_from_json(json_io::parse(json_io::read_file(path)));
}

std::string text_or_file(const std::string& text, const std::string& file, const char* what) {
  if (!file.empty()) return json_io::read_file(file);
  if (text.empty()) throw UsageError(std::string("one of --") + what + "-text or --" + what + "-file is required");
  return text;
}

// ---- keygen ---------------------------------------------------------------

struct KeygenArgs {
  std::string id;
  std::string seed_hex;
  std::string out;
};

Output run_keygen(const Context& ctx, const KeygenArgs& a) {
  json_io::KeyFile key{a.id, {}};
  if (a.seed_hex.empty()) {
    key.keys = crypto::generate_keypair();
  } else {
    const auto seed = from_hex(a.seed_hex);
    if (seed.size() != 32) throw UsageError("--seed-hex must be 32 bytes");
    key.keys = crypto::generate_keypair(seed);
  }
  fs::path out = a.out;
  if (out.empty() && ctx.home) {
    fs::create_directories(*ctx.home / "keys");
    out = *ctx.home / "keys" / (a.id + ".json");
  }
  Json payload{{"id", key.id}, {"public_key", key.keys.public_key.hex()}};
  if (out.empty()) {
    payload = json_io::to_json(key);
  } else {
    json_io::write_file(out, json_io::to_json(key).dump(2) + "\n");
    ::chmod(out.c_str(), 0600);
    payload["path"] = out.string();
  }
  return {payload, 0, {}};
}

// ---- cert ------------------------------------------------------------------

struct CertIssueArgs {
  std::string subject;
  std::string subject_key;
  std::string manifest;
  std::string issuer;
  std::string issuer_key;
  bool root = false;
  std::string out;
};

Output run_cert_issue(const Context& ctx, const CertIssueArgs& a) {
  auto subject = json_io::subject_from_json(json_io::parse(json_io::read_file(a.subject)));
  const auto subject_key = load_key(a.subject_key);
  subject.public_key = subject_key.keys.public_key;
  subject.manifest_hash =
      cert::manifest_hash(json_io::manifest_from_json(json_io::parse(json_io::read_file(a.manifest))));
  cert::Certificate issued;
  if (a.root) {
    if (!a.issuer.empty()) throw UsageError("--root and --issuer are exclusive");
    issued = cert::issue_root(subject, subject_key.keys.secret_key);
  } else {
    if (a.issuer.empty() || a.issuer_key.empty()) throw UsageError("--issuer and --issuer-key are required");
    issued = cert::issue_certificate(load_cert(a.issuer), load_key(a.issuer_key).keys.secret_key, subject, ctx.now());
  }
  const auto pem = cert::to_pem(issued);
  auto payload = json_io::to_json(issued);
  if (!a.out.empty()) {
    json_io::write_file(a.out, pem);
    return {payload, 0, {}};
  }
  return {payload, 0, pem};
}

Output run_cert_inspect(const std::vector<std::string>& files) {
  Json arr = Json::array();
  for (const auto& c : load_certs(files)) arr.push_back(json_io::to_json(c));
  return {arr.size() == 1 ? arr[0] : arr, 0, {}};
}

Output run_manifest_hash(const std::string& file) {
  const auto m = json_io::manifest_from_json(json_io::parse(json_io::read_file(file)));
  const auto h = cert::manifest_hash(m).hex();
  return {Json{{"manifest_hash", h}, {"entries", m.entries.size()}}, 0, h + "\n"};
}

struct RevokeArgs {
  std::string cert_id;
  std::optional<std::uint64_t> at;
  std::string registry;
};

Output run_revoke(const Context& ctx, const RevokeArgs& a) {
  const auto path = ctx.home_path("--registry", a.registry, "revocations.jsonl");
  verifier::RevocationRegistry registry;
  if (fs::exists(path)) registry = json_io::revocations_from_jsonl(json_io::read_file(path));
  registry.revoke(a.cert_id, a.at.value_or(ctx.now()));
  json_io::write_file(path, json_io::revocations_to_jsonl(registry));
  return {Json{{"cert_id", a.cert_id}, {"revoked_at", *registry.revoked_at(a.cert_id)}, {"registry", path.string()}},
          0,
          {}};
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> chain;
  std::string manifest;
  std::string tier;
  std::string credential_id = "credential";
  std::vector<std::string> anchors;
  std::string revocations;
  std::string model;
};

cert::ModelBinding parse_model(const std::string& text) {
  const auto a = text.find('/');
  const auto b = a == std::string::npos ? a : text.find('/', a + 1);
  if (b == std::string::npos || text.find('/', b + 1) != std::string::npos) {
    throw UsageError("--model must be provider/model_id/model_ver");
  }
  return {text.substr(0, a), text.substr(a + 1, b - a - 1), text.substr(b + 1)};
}

Output run_verify(const Context& ctx, const VerifyArgs& a) {
  const auto chain = load_certs(a.chain);
  const auto manifest = json_io::manifest_from_json(json_io::parse(json_io::read_file(a.manifest)));
  std::vector<cert::Certificate> roots;
  if (!a.anchors.empty()) {
    roots = load_certs(a.anchors);
  } else if (ctx.home && fs::exists(*ctx.home / "anchors.pem")) {
    roots = load_certs({(*ctx.home / "anchors.pem").string()});
  } else {
    throw UsageError("--anchor is required when GOVKIT_HOME has no anchors.pem");
  }
  verifier::RevocationRegistry revocations;
  fs::path rev_path = a.revocations;
  if (rev_path.empty() && ctx.home) rev_path = *ctx.home / "revocations.jsonl";
  if (!rev_path.empty() && fs::exists(rev_path)) {
    revocations = json_io::revocations_from_jsonl(json_io::read_file(rev_path));
  } else if (!a.revocations.empty()) {
    throw Error(ErrorCode::storage_failure, "cannot read " + a.revocations);
  }
  verifier::VerifyOptions options;
  if (!a.model.empty()) options.runtime_model = parse_model(a.model);
  const verifier::Credential credential{a.credential_id, cert::tier_from_string(a.tier), {}};
  const auto decision = verifier::verify_access(chain, credential, manifest, verifier::anchors_from(roots),
                                                revocations, ctx.now(), options);
  return {json_io::to_json(decision), decision.allowed() ? 0 : 1, {}};
}

// ---- ledger ----------------------------------------------------------------

struct LedgerAppendArgs {
  std::string ledger;
  std::string sender_key;
  std::string receiver_key;
  std::string sender_cert;
  std::string receiver_cert;
  std::string input_text;
  std::string input_file;
  std::string output_text;
  std::string output_file;
  bool execute = false;
  std::uint64_t seed = 0;
  bool no_sync = false;
};

Output run_ledger_append(const Context& ctx, const LedgerAppendArgs& a) {
  const auto path = ctx.home_path("--ledger", a.ledger, "ledger.bin");
  const auto sender_key = load_key(a.sender_key);
  const auto receiver_key = load_key(a.receiver_key);
  const auto sender_cert = load_cert(a.sender_cert);
  const auto receiver_cert = load_cert(a.receiver_cert);
  if (sender_cert.public_key != sender_key.keys.public_key || sender_cert.id != sender_key.id) {
    throw Error(ErrorCode::key_mismatch, "sender key does not belong to " + sender_cert.id);
  }
  if (receiver_cert.public_key != receiver_key.keys.public_key || receiver_cert.id != receiver_key.id) {
    throw Error(ErrorCode::key_mismatch, "receiver key does not belong to " + receiver_cert.id);
  }
  const auto input = text_or_file(a.input_text, a.input_file, "input");
  std::string output;
  if (a.execute) {
    if (!a.output_text.empty() || !a.output_file.empty()) throw UsageError("--execute replaces --output-*");
    repro::DeterministicExecutor executor(receiver_cert.model);
    output = executor.execute(as_bytes(input), a.seed, receiver_cert.repro.config);
  } else {
    output = text_or_file(a.output_text, a.output_file, "output");
  }
  auto to_bytes = [](const crypto::Digest& d) { return Bytes(d.bytes.begin(), d.bytes.end()); };
  ledger::AppendRequest request;
  request.timestamp = ctx.now();
  request.sender_id = sender_cert.id;
  request.receiver_id = receiver_cert.id;
  request.sender_cert_hash = to_bytes(cert::certificate_hash(sender_cert));
  request.receiver_cert_hash = to_bytes(cert::certificate_hash(receiver_cert));
  request.input_commitment = to_bytes(crypto::digest(input));
  request.output_commitment = to_bytes(crypto::digest(output));
  request.anchor = {a.seed, receiver_cert.model.model_ver, receiver_cert.manifest_hash};

  Lock lock(path);
  auto ledger = ledger::Ledger::open(path, !a.no_sync);
  const auto record = ledger.append(request, sender_key.keys.secret_key, receiver_key.keys.secret_key);
  auto payload = json_io::parse(ledger::export_jsonl({record}));
  if (a.execute) payload["output"] = output;
  return {payload, 0, {}};
}

ledger::KeyDirectory key_directory(const std::vector<std::string>& certs, const std::vector<std::string>& keys) {
  ledger::KeyDirectory dir;
  for (const auto& c : load_certs(certs)) dir[c.id] = c.public_key;
  for (const auto& k : keys) {
    const auto j = json_io::parse(json_io::read_file(k));
    if (!j.contains("id") || !j.contains("public_key") || !j["id"].is_string() || !j["public_key"].is_string()) {
      throw Error(ErrorCode::malformed, k + ": key file needs id and public_key");
    }
    dir[j["id"].get<std::string>()] = crypto::PublicKey::from_hex(j["public_key"].get<std::string>());
  }
  return dir;
}

struct LedgerAuditArgs {
  std::string ledger;
  std::vector<std::string> certs;
  std::vector<std::string> keys;
};

Output run_ledger_audit(const Context& ctx, const LedgerAuditArgs& a) {
  const auto path = ctx.home_path("--ledger", a.ledger, "ledger.bin");
  const auto dir = key_directory(a.certs, a.keys);
  Lock lock(path);
  const auto storage = json_io::read_file(path);
  const auto report = ledger::audit_storage(as_bytes(storage), dir);
  return {json_io::to_json(report), report.ok ? 0 : 1, {}};
}

Output run_ledger_export(const Context& ctx, const std::string& ledger_arg) {
  const auto path = ctx.home_path("--ledger", ledger_arg, "ledger.bin");
  Lock lock(path);
  const auto records = ledger::parse_storage(as_bytes(json_io::read_file(path)));
  const auto jsonl = ledger::export_jsonl(records);
  Json arr = Json::array();
  std::istringstream in(jsonl);
  for (std::string line; std::getline(in, line);) arr.push_back(json_io::parse(line));
  return {arr, 0, jsonl};
}

struct TamperArgs {
  std::string ledger;
  std::vector<std::string> certs;
  std::vector<std::string> keys;
  std::size_t records = 16;
  std::optional<std::size_t> offset;
  std::string out;
};

// Flips one byte and audits before and after. Without --ledger a demo ledger
// with freshly generated parties is used.
Output run_tamper_demo(const Context& ctx, const TamperArgs& a) {
  Bytes storage;
  ledger::KeyDirectory dir;
  if (!a.ledger.empty()) {
    Lock lock(a.ledger);
    const auto s = json_io::read_file(a.ledger);
    storage.assign(s.begin(), s.end());
    dir = key_directory(a.certs, a.keys);
  } else {
    if (a.records < 1) throw UsageError("--records must be at least 1");
    const auto alice = crypto::generate_keypair(crypto::digest("govkit/demo/alice").view());
    const auto bob = crypto::generate_keypair(crypto::digest("govkit/demo/bob").view());
    dir = {{"alice", alice.public_key}, {"bob", bob.public_key}};
    ledger::Ledger demo;
    for (std::size_t i = 0; i < a.records; ++i) {
      const bool forward = i % 2 == 0;
      ledger::AppendRequest r;
      r.timestamp = ctx.now() + i;
      r.sender_id = forward ? "alice" : "bob";
      r.receiver_id = forward ? "bob" : "alice";
      auto d = [](const std::string& s) {
        const auto h = crypto::digest(s);
        return Bytes(h.bytes.begin(), h.bytes.end());
      };
      r.sender_cert_hash = d("cert/" + r.sender_id);
      r.receiver_cert_hash = d("cert/" + r.receiver_id);
      r.input_commitment = d("input " + std::to_string(i));
      r.output_commitment = d("output " + std::to_string(i));
      r.anchor = {i, "demo-1", crypto::digest("skills")};
      demo.append(r, forward ? alice.secret_key : bob.secret_key, forward ? bob.secret_key : alice.secret_key);
    }
    storage = demo.serialize();
  }
  if (storage.empty()) throw UsageError("ledger is empty");
  const auto before = ledger::audit_storage(storage, dir);
  std::size_t offset = storage.size() / 2;
  if (a.offset) {
    if (*a.offset >= storage.size()) throw UsageError("--offset is past the end of the ledger");
    offset = *a.offset;
  }
  Bytes tampered = storage;
  tampered[offset] ^= 0x01;
  const auto after = ledger::audit_storage(tampered, dir);
  if (!a.out.empty()) json_io::write_file(a.out, std::string(tampered.begin(), tampered.end()));
  return {Json{{"mutated_offset", offset},
               {"storage_bytes", storage.size()},
               {"before", json_io::to_json(before)},
               {"after", json_io::to_json(after)}},
          after.ok ? 0 : 1,
          {}};
}

// ---- replay / budget / calibrate / cvd --------------------------------------

struct ReplayArgs {
  std::string cert;
  std::string ledger;
  std::uint64_t seq = 0;
  std::string input_text;
  std::string input_file;
  std::string output_text;
  std::string output_file;
  double noise_rate = 0.0;
  std::uint64_t noise_seed = 0;
};

Output run_replay(const Context& ctx, const ReplayArgs& a) {
  const auto certificate = load_cert(a.cert);
  const auto path = ctx.home_path("--ledger", a.ledger, "ledger.bin");
  std::vector<ledger::InteractionRecord> records;
  {
    Lock lock(path);
    records = ledger::parse_storage(as_bytes(json_io::read_file(path)));
  }
  auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.seq == a.seq; });
  if (it == records.end()) throw UsageError("no record with seq " + std::to_string(a.seq));
  if (it->receiver_id != certificate.id) {
    throw UsageError("record " + std::to_string(a.seq) + " was received by '" + it->receiver_id + "', not '" +
                     certificate.id + "'");
  }
  if (a.noise_rate < 0 || a.noise_rate > 1) throw UsageError("--noise-rate must lie in [0, 1]");
  const auto input = text_or_file(a.input_text, a.input_file, "input");
  const auto output = text_or_file(a.output_text, a.output_file, "output");
  std::shared_ptr<repro::ModelExecutor> executor = std::make_shared<repro::DeterministicExecutor>(certificate.model);
  if (a.noise_rate > 0) executor = std::make_shared<repro::ParaphraseNoiseExecutor>(executor, a.noise_rate, a.noise_seed);
  const auto verdict = repro::replay_verify(certificate, *it, output, as_bytes(input), *executor);
  auto payload = json_io::to_json(verdict);
  payload["seq"] = a.seq;
  return {payload, verdict.verdict == repro::ReplayOutcome::VIOLATION ? 1 : 0, {}};
}

struct BudgetArgs {
  std::optional<std::uint64_t> n;
  std::optional<double> epsilon;
  double alpha = 0.01;
};

Output run_budget(const BudgetArgs& a) {
  if (a.n.has_value() == a.epsilon.has_value()) throw UsageError("give exactly one of --n and --epsilon");
  if (a.n) {
    const auto b = repro::make_budget(*a.n, a.alpha);
    return {json_io::to_json(b), 0, {}};
  }
  const auto n = repro::required_budget(*a.epsilon, a.alpha);
  auto payload = json_io::to_json(repro::make_budget(n, a.alpha));
  payload["target_epsilon"] = *a.epsilon;
  payload["approximate_n"] = repro::approximate_budget(*a.epsilon, a.alpha);
  return {payload, 0, {}};
}

Output run_calibrate(const std::string& pairs_file) {
  const auto pairs = json_io::pairs_from_jsonl(json_io::read_file(pairs_file));
  std::vector<repro::LabeledScores> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) scored.push_back({repro::score_all(p.text_a, p.text_b), p.label});
  return {json_io::to_json(repro::calibrate_thresholds(scored)), 0, {}};
}

Output run_cvd(const Context& ctx, const std::vector<std::string>& chain_files, const std::string& ledger_arg) {
  const auto chain = load_certs(chain_files);
  const auto n = chain.size() - 1;
  Json payload{{"chain_length", n}, {"cvd", repro::chain_verifiability_depth(chain)}};
  fs::path path = ledger_arg;
  if (path.empty() && ctx.home && fs::exists(*ctx.home / "ledger.bin")) path = *ctx.home / "ledger.bin";
  if (!path.empty()) {
    Lock lock(path);
    const auto records = ledger::parse_storage(as_bytes(json_io::read_file(path)));
    const auto edges = repro::chain_edges(chain);
    const auto effective = repro::effective_verification_depth(chain, edges, records);
    payload["cad"] = ledger::chain_auditability_depth(edges, records);
    payload["effective_depth"] = effective;
    payload["partial_verifiability"] = effective < n;
  }
  return {payload, 0, {}};
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::size_t agents = 5;
  std::string attack;
  std::string mode = "full";
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  bool baseline = false;
  bool overhead = false;
  std::size_t repetitions = 10;
  std::string report;
};

harness::GovernanceMode mode_from_string(const std::string& s) {
  for (auto m : {harness::GovernanceMode::none, harness::GovernanceMode::auth_only, harness::GovernanceMode::trace_only,
                 harness::GovernanceMode::full}) {
    if (harness::to_string(m) == s) return m;
  }
  throw UsageError("--mode must be none, auth-only, trace-only or full");
}

Output run_simulate(const Context& ctx, const SimulateArgs& a) {
  if (a.agents != 5 && a.agents != 10 && a.agents != 20) throw UsageError("--agents must be 5, 10 or 20");
  harness::PipelineConfig config;
  config.agent_count = a.agents;
  config.seed = a.seed;
  if (ctx.now_flag) config.start_time = *ctx.now_flag;
  Json payload;
  int code = 0;
  if (a.overhead) {
    const auto scratch = fs::temp_directory_path() / ("govkit-overhead-" + std::to_string(::getpid()));
    fs::create_directories(scratch);
    const auto rows = harness::measure_overhead({5, 10, 20}, a.repetitions, true, scratch);
    fs::remove_all(scratch);
    payload = Json{{"schema", "govkit.overhead/1"}, {"rows", json_io::to_json(rows)}};
  } else if (a.baseline) {
    std::vector<harness::Scenario> scenarios(std::begin(harness::kEndToEndScenarios),
                                             std::end(harness::kEndToEndScenarios));
    payload = Json{{"schema", "govkit.baseline/1"},
                   {"matrix", json_io::to_json(harness::run_baseline_comparison(config, scenarios))}};
  } else if (!a.attack.empty()) {
    const auto report = harness::run_attack(config, harness::scenario_from_string(a.attack), mode_from_string(a.mode));
    payload = json_io::to_json(report);
    code = report.detections.empty() ? 0 : 1;
  } else {
    if (a.runs < 1) throw UsageError("--runs must be at least 1");
    Json runs = Json::array();
    std::size_t calls = 0, denials = 0, false_positives = 0;
    bool audits_ok = true;
    for (std::size_t i = 0; i < a.runs; ++i) {
      config.seed = a.seed + i;
      const auto report = harness::run_clean_pipeline(config);
      calls += report.governed_calls;
      denials += report.denials;
      false_positives += report.false_positive_count;
      audits_ok = audits_ok && report.audit.ok;
      if (a.runs == 1) payload = json_io::to_json(report);
    }
    if (a.runs > 1) {
      payload = Json{{"schema", "govkit.clean-runs/1"},
                     {"runs", a.runs},
                     {"governed_calls", calls},
                     {"denials", denials},
                     {"false_positive_count", false_positives},
                     {"audits_ok", audits_ok}};
    }
    code = false_positives == 0 && audits_ok ? 0 : 1;
  }
  if (!a.report.empty()) json_io::write_file(a.report, payload.dump(2) + "\n");
  return {payload, code, {}};
}

}  // namespace

CommandResult dispatch(const std::vector<std::string>& args) {
  CommandResult result;
  CLI::App app{"govkit: certificates, access verification, interaction ledger and replay checks", "govkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_flag("--json", ctx.json, "Print a single JSON document on stdout");
  std::uint64_t now_value = 0;
  auto* now_opt = app.add_option("--now", now_value, "Current time in epoch milliseconds (default: system clock)");

  KeygenArgs keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate an Ed25519 key file");
  keygen_cmd->add_option("--id", keygen.id, "Agent or authority id")->required();
  keygen_cmd->add_option("--seed-hex", keygen.seed_hex, "Deterministic 32-byte seed (hex)");
  keygen_cmd->add_option("--out", keygen.out, "Key file to write");

  auto* cert_cmd = app.add_subcommand("cert", "Certificate operations");
  cert_cmd->require_subcommand(1);
  cert_cmd->fallthrough();
  CertIssueArgs issue;
  auto* issue_cmd = cert_cmd->add_subcommand("issue", "Issue a certificate");
  issue_cmd->add_option("--subject", issue.subject, "Subject JSON")->required();
  issue_cmd->add_option("--subject-key", issue.subject_key, "Subject key file")->required();
  issue_cmd->add_option("--manifest", issue.manifest, "Skills manifest JSON")->required();
  issue_cmd->add_option("--issuer", issue.issuer, "Issuer certificate PEM");
  issue_cmd->add_option("--issuer-key", issue.issuer_key, "Issuer key file");
  issue_cmd->add_flag("--root", issue.root, "Self-issue a trust anchor");
  issue_cmd->add_option("--out", issue.out, "PEM file to write");
  std::vector<std::string> inspect_files;
  auto* inspect_cmd = cert_cmd->add_subcommand("inspect", "Summarize certificates");
  inspect_cmd->add_option("files", inspect_files, "PEM files")->required();
  std::string manifest_file;
  auto* mhash_cmd = cert_cmd->add_subcommand("manifest-hash", "Hash a skills manifest");
  mhash_cmd->add_option("manifest", manifest_file, "Manifest JSON")->required();
  RevokeArgs revoke;
  auto* revoke_cmd = cert_cmd->add_subcommand("revoke", "Revoke a certificate id");
  revoke_cmd->add_option("--cert-id", revoke.cert_id, "Certificate id")->required();
  revoke_cmd->add_option("--at", revoke.at, "Revocation time (default: --now)");
  revoke_cmd->add_option("--registry", revoke.registry, "Revocation JSONL file");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Decide an access request");
  verify_cmd->add_option("--chain", verify.chain, "Chain PEM files, root first")->required();
  verify_cmd->add_option("--manifest", verify.manifest, "Runtime skills manifest JSON")->required();
  verify_cmd->add_option("--credential-tier", verify.tier, "Tier of the requested credential")->required();
  verify_cmd->add_option("--credential-id", verify.credential_id, "Credential name");
  verify_cmd->add_option("--anchor", verify.anchors, "Trust anchor PEM files");
  verify_cmd->add_option("--revocations", verify.revocations, "Revocation JSONL file");
  verify_cmd->add_option("--model", verify.model, "Runtime model as provider/model_id/model_ver");

  auto* ledger_cmd = app.add_subcommand("ledger", "Interaction ledger operations");
  ledger_cmd->require_subcommand(1);
  ledger_cmd->fallthrough();
  LedgerAppendArgs append;
  auto* append_cmd = ledger_cmd->add_subcommand("append", "Append a bilaterally signed record");
  append_cmd->add_option("--ledger", append.ledger, "Ledger file");
  append_cmd->add_option("--sender-key", append.sender_key, "Sender key file")->required();
  append_cmd->add_option("--receiver-key", append.receiver_key, "Receiver key file")->required();
  append_cmd->add_option("--sender-cert", append.sender_cert, "Sender certificate PEM")->required();
  append_cmd->add_option("--receiver-cert", append.receiver_cert, "Receiver certificate PEM")->required();
  append_cmd->add_option("--input-text", append.input_text, "Exchanged input");
  append_cmd->add_option("--input-file", append.input_file, "File holding the exchanged input");
  append_cmd->add_option("--output-text", append.output_text, "Exchanged output");
  append_cmd->add_option("--output-file", append.output_file, "File holding the exchanged output");
  append_cmd->add_flag("--execute", append.execute, "Produce the output with the receiver's mock model");
  append_cmd->add_option("--seed", append.seed, "Sampling seed recorded in the anchor");
  append_cmd->add_flag("--no-sync", append.no_sync, "Skip fdatasync after the write");
  LedgerAuditArgs audit_args;
  auto* audit_cmd = ledger_cmd->add_subcommand("audit", "Audit a ledger file");
  audit_cmd->add_option("--ledger", audit_args.ledger, "Ledger file");
  audit_cmd->add_option("--cert", audit_args.certs, "Certificates naming the signers");
  audit_cmd->add_option("--key", audit_args.keys, "Key files naming the signers");
  std::string export_ledger;
  auto* export_cmd = ledger_cmd->add_subcommand("export", "Export records as JSON Lines");
  export_cmd->add_option("--ledger", export_ledger, "Ledger file");
  TamperArgs tamper;
  auto* tamper_cmd = ledger_cmd->add_subcommand("tamper-demo", "Flip one byte and show the audit catching it");
  tamper_cmd->add_option("--ledger", tamper.ledger, "Ledger file (default: a generated demo ledger)");
  tamper_cmd->add_option("--cert", tamper.certs, "Certificates naming the signers");
  tamper_cmd->add_option("--key", tamper.keys, "Key files naming the signers");
  tamper_cmd->add_option("--records", tamper.records, "Records in the demo ledger");
  tamper_cmd->add_option("--offset", tamper.offset, "Byte to flip (default: middle)");
  tamper_cmd->add_option("--out", tamper.out, "Write the tampered ledger here");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay-verify", "Replay a recorded interaction against its commitment");
  replay_cmd->add_option("--cert", replay.cert, "Receiver certificate PEM")->required();
  replay_cmd->add_option("--ledger", replay.ledger, "Ledger file");
  replay_cmd->add_option("--seq", replay.seq, "Record sequence number")->required();
  replay_cmd->add_option("--input-text", replay.input_text, "Disclosed input");
  replay_cmd->add_option("--input-file", replay.input_file, "File holding the disclosed input");
  replay_cmd->add_option("--output-text", replay.output_text, "Original output");
  replay_cmd->add_option("--output-file", replay.output_file, "File holding the original output");
  replay_cmd->add_option("--noise-rate", replay.noise_rate, "Paraphrase noise of the replay executor");
  replay_cmd->add_option("--noise-seed", replay.noise_seed, "Noise seed of the replay executor");

  BudgetArgs budget;
  auto* budget_cmd = app.add_subcommand("budget", "Replay budget arithmetic");
  budget_cmd->add_option("--n", budget.n, "Passed trials");
  budget_cmd->add_option("--epsilon", budget.epsilon, "Target divergence bound");
  budget_cmd->add_option("--alpha", budget.alpha, "Significance level");

  std::string pairs_file;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit per-metric thresholds");
  calibrate_cmd->add_option("--pairs", pairs_file, "Labelled pairs JSONL")->required();

  std::vector<std::string> cvd_chain;
  std::string cvd_ledger;
  auto* cvd_cmd = app.add_subcommand("cvd", "Chain verifiability and auditability depth");
  cvd_cmd->add_option("--chain", cvd_chain, "Chain PEM files, root first")->required();
  cvd_cmd->add_option("--ledger", cvd_ledger, "Ledger file for the auditability depth");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the governed pipeline simulation");
  sim_cmd->add_option("--agents", sim.agents, "5, 10 or 20");
  sim_cmd->add_option("--attack", sim.attack, "Scenario S1..S9 or E2E1..E2E7");
  sim_cmd->add_option("--mode", sim.mode, "none, auth-only, trace-only or full");
  sim_cmd->add_option("--seed", sim.seed, "Run seed");
  sim_cmd->add_option("--runs", sim.runs, "Number of clean runs");
  sim_cmd->add_flag("--baseline", sim.baseline, "Detection matrix of the baselines");
  sim_cmd->add_flag("--overhead", sim.overhead, "Governance cost across 5, 10 and 20 agents");
  sim_cmd->add_option("--repetitions", sim.repetitions, "Runs per agent count for --overhead");
  sim_cmd->add_option("--report", sim.report, "Also write the JSON report here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    result.exit_code = app.exit(e, out, err) == 0 ? 0 : 2;
    result.out = out.str();
    result.err = err.str();
    return result;
  }
  if (now_opt->count() > 0) ctx.now_flag = now_value;
  if (const char* home = std::getenv("GOVKIT_HOME"); home && *home) ctx.home = fs::path(home);

  Output output;
  try {
    if (keygen_cmd->parsed()) {
      output = run_keygen(ctx, keygen);
    } else if (issue_cmd->parsed()) {
      output = run_cert_issue(ctx, issue);
    } else if (inspect_cmd->parsed()) {
      output = run_cert_inspect(inspect_files);
    } else if (mhash_cmd->parsed()) {
      output = run_manifest_hash(manifest_file);
    } else if (revoke_cmd->parsed()) {
      output = run_revoke(ctx, revoke);
    } else if (verify_cmd->parsed()) {
      output = run_verify(ctx, verify);
    } else if (append_cmd->parsed()) {
      output = run_ledger_append(ctx, append);
    } else if (audit_cmd->parsed()) {
      output = run_ledger_audit(ctx, audit_args);
    } else if (export_cmd->parsed()) {
      output = run_ledger_export(ctx, export_ledger);
    } else if (tamper_cmd->parsed()) {
      output = run_tamper_demo(ctx, tamper);
    } else if (replay_cmd->parsed()) {
      output = run_replay(ctx, replay);
    } else if (budget_cmd->parsed()) {
      output = run_budget(budget);
    } else if (calibrate_cmd->parsed()) {
      output = run_calibrate(pairs_file);
    } else if (cvd_cmd->parsed()) {
      output = run_cvd(ctx, cvd_chain, cvd_ledger);
    } else if (sim_cmd->parsed()) {
      output = run_simulate(ctx, sim);
    } else {
      result.exit_code = 2;
      result.err = app.help();
      return result;
    }
  } catch (const UsageError& e) {
    result.exit_code = 2;
    result.err = std::string("error: ") + e.what() + "\n";
    return result;
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.code());
    result.err = std::string("error: ") + e.what() + "\n";
    return result;
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.err = std::string("error: ") + e.what() + "\n";
    return result;
  }

  result.exit_code = output.exit_code;
  if (ctx.json) {
    result.out = output.payload.dump(2) + "\n";
  } else if (!output.text.empty()) {
    result.out = output.text;
  } else {
    flatten(output.payload, "", result.out);
  }
  return result;
}

}  // namespace govkit::cli
