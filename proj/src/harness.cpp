#include "govkit/harness.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <thread>

#include "govkit/error.hpp"
#include "govkit/executors.hpp"
#include "govkit/forensics.hpp"
#include "govkit/replay.hpp"
#include "govkit/verifier.hpp"

namespace govkit::harness {

std::size_t scripted_calls(std::size_t agent_count) {
  switch (agent_count) {
    case 5: return 7;
    case 10: return 16;
    case 20: return 33;
    default: break;
  }
  if (agent_count < 2) throw Error(ErrorCode::invalid_argument, "pipeline needs at least two agents");
  // Dispatch to every specialist, then hand off along three quarters of them.
  const auto specialists = agent_count - 1;
  return specialists + (3 * specialists) / 4;
}

namespace {

using Clock = std::chrono::steady_clock;
using cert::Certificate;
using cert::ReproLevel;
using cert::Tier;

constexpr std::uint64_t kDay = 86'400'000;

const ScenarioSpec kSpecs[] = {
    {Scenario::S1, "silent escalation", "research", "tool added at runtime", Layer::G1, "MANIFEST_MISMATCH"},
    {Scenario::S2, "tool trojanization", "research", "tool code hash changed", Layer::G1, "MANIFEST_MISMATCH"},
    {Scenario::S3, "model substitution", "analysis", "certificate signed by a non-root key", Layer::G1,
     "BAD_SIGNATURE"},
    {Scenario::S4, "phantom delegation", "writer", "T2 agent issues a T1 certificate", Layer::G1,
     "CONSTRAINT_VIOLATION"},
    {Scenario::S5, "evidence tampering", "ledger", "byte edit of a stored record", Layer::G3, "SIG_SENDER"},
    {Scenario::S6, "blame shifting", "ledger", "sender alone re-signs an edited record", Layer::G3, "SIG_RECEIVER"},
    {Scenario::S7, "credential collusion", "review", "two T3 agents jointly request a T1 credential", Layer::G1,
     "TIER_EXCEEDED"},
    {Scenario::S8, "chain forgery", "research", "chain anchored at a fabricated root", Layer::G1, "UNTRUSTED_ROOT"},
    {Scenario::S9, "depth overflow", "research", "delegation from a depth-0 agent", Layer::G1, "DEPTH_EXHAUSTED"},
    {Scenario::E2E1, "capability escalation", "research", "tool added at runtime", Layer::G1, "MANIFEST_MISMATCH"},
    {Scenario::E2E2, "model substitution", "analysis", "different model behind a valid certificate", Layer::G1,
     "MODEL_MISMATCH"},
    {Scenario::E2E3, "phantom delegation", "writer", "T2 agent issues a T1 certificate", Layer::G1,
     "CONSTRAINT_VIOLATION"},
    {Scenario::E2E4, "ledger tampering", "ledger", "both parties re-sign an edited interior record", Layer::G3,
     "CHAIN_BREAK"},
    {Scenario::E2E5, "tool trojanization", "research", "tool code hash changed", Layer::G1, "MANIFEST_MISMATCH"},
    {Scenario::E2E6, "depth overflow", "review", "child issued with the issuer's own depth", Layer::G1,
     "CONSTRAINT_VIOLATION"},
    {Scenario::E2E7, "replay divergence", "analysis", "attacker-controlled output", Layer::G2, "VIOLATION"},
};

enum class Role { coordinator, research, analysis, writer, review, sub };

struct RoleProfile {
  std::string_view name;
  std::string_view model_id;
  Tier tier;
  ReproLevel repro;
  std::string_view credential;
  std::vector<std::pair<std::string_view, std::string_view>> tools;  // name, scope
};

const RoleProfile& profile(Role role) {
  static const RoleProfile coordinator{"coordinator", "planner-l", Tier::T1, ReproLevel::statistical, "cred-plan",
                                       {{"dispatch", "agents:invoke"}}};
  static const RoleProfile research{"research", "searcher-m", Tier::T2, ReproLevel::full, "cred-web",
                                    {{"fetch_page", "net:read"}, {"web_search", "net:read"}}};
  static const RoleProfile analysis{"analysis", "analyst-m", Tier::T2, ReproLevel::statistical, "cred-warehouse",
                                    {{"python_exec", "sandbox:exec"}, {"sql_query", "db:read"}}};
  static const RoleProfile writer{"writer", "writer-m", Tier::T2, ReproLevel::full, "cred-docs",
                                  {{"doc_write", "docs:write"}, {"spell_check", "docs:read"}}};
  static const RoleProfile review{"review", "reviewer-s", Tier::T3, ReproLevel::statistical, "cred-review",
                                  {{"fact_check", "net:read"}, {"lint", "docs:read"}}};
  static const RoleProfile sub{"sub", "helper-s", Tier::T3, ReproLevel::full, "cred-helper",
                               {{"summarize", "docs:read"}}};
  switch (role) {
    case Role::coordinator: return coordinator;
    case Role::research: return research;
    case Role::analysis: return analysis;
    case Role::writer: return writer;
    case Role::review: return review;
    case Role::sub: return sub;
  }
  return sub;
}

constexpr std::string_view kProvider = "mockai";
constexpr std::string_view kModelVer = "2025-01";
constexpr std::string_view kSubstituteModel = "analyst-s";

cert::ModelBinding binding(std::string_view model_id) {
  return {std::string(kProvider), std::string(model_id), std::string(kModelVer)};
}

cert::SkillsManifest manifest_for(const RoleProfile& p) {
  cert::SkillsManifest m;
  for (auto [name, scope] : p.tools) {
    m.entries.push_back({std::string(name), "1.0",
                         cert::descriptor_hash(name, "1.0", std::string(name) + "(input: string) -> string"),
                         {std::string(scope)}});
  }
  return cert::normalize(std::move(m));
}

std::uint64_t mix(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  const auto d = crypto::digest("govkit/harness/" + std::to_string(seed) + "/" + std::string(label) + "/" +
                                std::to_string(index));
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d.bytes[i];
  return v;
}

crypto::KeyPair derive_keys(std::uint64_t seed, std::string_view id) {
  const auto d = crypto::digest("govkit/harness-key/" + std::to_string(seed) + "/" + std::string(id));
  return crypto::generate_keypair(d.view());
}

struct Agent {
  std::string id;
  Role role = Role::sub;
  crypto::KeyPair keys;
  std::vector<Certificate> chain;
  cert::SkillsManifest runtime_manifest;
  cert::ModelBinding runtime_model;
  std::shared_ptr<repro::ModelExecutor> honest;
  std::shared_ptr<repro::ModelExecutor> runtime;
  verifier::Credential credential;
  crypto::Digest cert_hash;
  std::string last_output;

  const Certificate& cert() const { return chain.back(); }
};

struct Call {
  std::size_t sender;
  std::size_t receiver;
};

// Stored exchange for the trace-only baseline: no signatures, no linkage.
struct TraceEntry {
  std::string sender;
  std::string receiver;
  std::string input;
  std::string output;
};

class Pipeline {
 public:
  Pipeline(const PipelineConfig& config, GovernanceMode mode, crypto::SignatureCache* cache)
      : config_(config), mode_(mode), cache_(cache ? cache : &own_cache_) {
    if (config.ledger_path) ledger_ = ledger::Ledger::open(*config.ledger_path, config.durable);
    build_tree();
    build_script();
  }

  void inject(Scenario s);
  RunReport run();

  std::vector<Certificate> certificates() const {
    std::vector<Certificate> out{root_cert_, org_cert_};
    for (const auto& a : agents_) out.push_back(a.cert());
    return out;
  }

 private:
  std::uint64_t now(std::size_t call) const { return config_.start_time + 1000 * call; }
  const Certificate& root() const { return root_cert_; }

  cert::SubjectFields subject_for(const std::string& id, const RoleProfile& p, std::uint32_t depth,
                                  const crypto::KeyPair& keys) const;
  Agent make_agent(const std::string& id, Role role, std::uint32_t depth, const Agent* parent,
                   std::optional<Tier> tier_override = std::nullopt, bool unchecked = false);
  std::size_t add_agent(Agent a);
  std::size_t index_of(Role role, std::size_t nth = 0) const;

  void build_tree();
  void build_script();
  void governed_call(std::size_t index, const Call& call, RunReport& report);
  void joint_request(RunReport& report);
  void post_run(RunReport& report);
  Bytes tamper(Bytes storage, Scenario s) const;
  bool authenticate(const Agent& a) const;

  PipelineConfig config_;
  GovernanceMode mode_;
  crypto::SignatureCache own_cache_;
  crypto::SignatureCache* cache_;
  std::optional<Scenario> scenario_;

  crypto::KeyPair root_keys_;
  crypto::KeyPair org_keys_;
  Certificate root_cert_;
  Certificate org_cert_;
  std::vector<Agent> agents_;
  std::vector<Call> script_;
  std::vector<std::size_t> joint_;
  std::string joint_credential_;

  verifier::TrustAnchors anchors_;
  verifier::RevocationRegistry revocations_;
  ledger::Ledger ledger_;
  ledger::KeyDirectory keys_;
  std::map<std::uint64_t, ledger::Disclosure> disclosures_;
  std::vector<TraceEntry> traces_;
};

cert::SubjectFields Pipeline::subject_for(const std::string& id, const RoleProfile& p, std::uint32_t depth,
                                          const crypto::KeyPair& keys) const {
  cert::SubjectFields s;
  s.id = id;
  s.public_key = keys.public_key;
  s.model = binding(p.model_id);
  s.manifest_hash = cert::manifest_hash(manifest_for(p));
  s.constraints.max_tier = p.tier;
  s.constraints.max_depth = depth;
  s.constraints.allowed_models = {std::string(p.model_id)};
  s.constraints.max_rate = cert::Rate::make(10, 1);
  s.repro.level = p.repro;
  s.repro.config = {{"seed_policy", "recorded"}, {"temperature", "0"}};
  if (p.repro == ReproLevel::statistical) s.repro.config["theta"] = "0.85";
  s.governance_level = p.repro == ReproLevel::full ? cert::GovernanceLevel::L3_compiletime
                                                   : cert::GovernanceLevel::L2_sampled;
  s.node_type = cert::NodeType::AG;
  s.not_before = config_.start_time - kDay;
  s.not_after = config_.start_time + 365 * kDay;
  return s;
}

Agent Pipeline::make_agent(const std::string& id, Role role, std::uint32_t depth, const Agent* parent,
                           std::optional<Tier> tier_override, bool unchecked) {
  const auto& p = profile(role);
  Agent a;
  a.id = id;
  a.role = role;
  a.keys = derive_keys(config_.seed, id);
  auto subject = subject_for(id, p, depth, a.keys);
  if (tier_override) subject.constraints.max_tier = *tier_override;
  if (role == Role::sub && parent) {
    // Helpers run on their delegator's model so the model subset holds.
    subject.model = parent->cert().model;
    subject.constraints.allowed_models = parent->cert().constraints.allowed_models;
  }
  if (role == Role::coordinator) {
    for (auto r : {Role::coordinator, Role::research, Role::analysis, Role::writer, Role::review, Role::sub}) {
      subject.constraints.allowed_models.insert(std::string(profile(r).model_id));
    }
    subject.constraints.max_rate = cert::Rate::make(100, 1);
  }
  const Certificate& issuer = parent ? parent->cert() : org_cert_;
  const auto& issuer_key = parent ? parent->keys.secret_key : org_keys_.secret_key;
  Certificate c;
  if (unchecked) {
    c.id = subject.id;
    c.parent_id = issuer.id;
    c.public_key = subject.public_key;
    c.model = subject.model;
    c.manifest_hash = subject.manifest_hash;
    c.constraints = subject.constraints;
    c.repro = subject.repro;
    c.governance_level = subject.governance_level;
    c.node_type = subject.node_type;
    c.not_before = subject.not_before;
    c.not_after = subject.not_after;
    c = cert::sign_unchecked(std::move(c), issuer_key);
  } else {
    c = cert::issue_certificate(issuer, issuer_key, subject, config_.start_time);
  }
  a.chain = parent ? parent->chain : std::vector<Certificate>{root_cert_, org_cert_};
  a.chain.push_back(c);
  a.runtime_manifest = manifest_for(p);
  a.runtime_model = c.model;
  auto base = std::make_shared<repro::DeterministicExecutor>(c.model);
  if (p.repro == ReproLevel::statistical) {
    a.runtime = std::make_shared<repro::ParaphraseNoiseExecutor>(base, 0.05, mix(config_.seed, id + "/run", 0));
    a.honest = std::make_shared<repro::ParaphraseNoiseExecutor>(base, 0.05, mix(config_.seed, id + "/replay", 0));
  } else {
    a.runtime = base;
    a.honest = base;
  }
  a.credential = {std::string(p.credential), p.tier, "vault://" + std::string(p.credential)};
  a.cert_hash = cert::certificate_hash(c);
  return a;
}

std::size_t Pipeline::add_agent(Agent a) {
  keys_[a.id] = a.keys.public_key;
  agents_.push_back(std::move(a));
  return agents_.size() - 1;
}

std::size_t Pipeline::index_of(Role role, std::size_t nth) const {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].role == role && nth-- == 0) return i;
  }
  throw Error(ErrorCode::invalid_argument, "pipeline has no such agent");
}

void Pipeline::build_tree() {
  const auto n = config_.agent_count;
  if (n < 2) throw Error(ErrorCode::invalid_argument, "pipeline needs a coordinator and a specialist");
  std::set<std::string> all_models;
  for (auto r : {Role::coordinator, Role::research, Role::analysis, Role::writer, Role::review, Role::sub}) {
    all_models.insert(std::string(profile(r).model_id));
  }
  auto na_subject = [&](const std::string& id, std::uint32_t depth, const crypto::KeyPair& keys) {
    cert::SubjectFields s;
    s.id = id;
    s.public_key = keys.public_key;
    s.manifest_hash = cert::manifest_hash({});
    s.constraints = {Tier::T0, depth, all_models, cert::Rate::make(1000, 1)};
    s.repro.level = ReproLevel::full;
    s.governance_level = cert::GovernanceLevel::L3_compiletime;
    s.node_type = cert::NodeType::NA;
    s.not_before = config_.start_time - 30 * kDay;
    s.not_after = config_.start_time + 3650 * kDay;
    return s;
  };
  root_keys_ = derive_keys(config_.seed, "root-ca");
  org_keys_ = derive_keys(config_.seed, "org");
  root_cert_ = cert::issue_root(na_subject("root-ca", 4, root_keys_), root_keys_.secret_key);
  auto org_subject = na_subject("org", 3, org_keys_);
  org_subject.constraints.max_rate = cert::Rate::make(500, 1);
  org_cert_ = cert::issue_certificate(root_cert_, root_keys_.secret_key, org_subject, config_.start_time);
  anchors_ = verifier::anchors_from(std::span<const Certificate>(&root_cert_, 1));

  add_agent(make_agent("coordinator", Role::coordinator, 2, nullptr));
  static constexpr Role kCycle[] = {Role::research, Role::analysis, Role::writer, Role::review};
  for (std::size_t i = 1; i < n; ++i) {
    const auto role = kCycle[(i - 1) % 4];
    add_agent(make_agent(std::string(profile(role).name) + "-" + std::to_string(i), role, 1, &agents_.front()));
  }
}

void Pipeline::build_script() {
  const auto specialists = agents_.size() - 1;
  const auto total = scripted_calls(config_.agent_count);
  for (std::size_t i = 0; i < specialists; ++i) script_.push_back({0, i + 1});
  for (std::size_t h = 0; script_.size() < total; ++h) {
    script_.push_back({1 + h % specialists, 1 + (h + 1) % specialists});
  }
}

void Pipeline::inject(Scenario s) {
  scenario_ = s;
  switch (s) {
    case Scenario::S1:
    case Scenario::E2E1: {
      auto& a = agents_[index_of(Role::research)];
      a.runtime_manifest.entries.push_back(
          {"shell_exec", "1.0", cert::descriptor_hash("shell_exec", "1.0", "(cmd: string) -> string"), {"os:exec"}});
      a.runtime_manifest = cert::normalize(std::move(a.runtime_manifest));
      break;
    }
    case Scenario::S2:
    case Scenario::E2E5: {
      auto& a = agents_[index_of(Role::research)];
      a.runtime_manifest.entries.front().h = crypto::digest("patched implementation of " + a.runtime_manifest.entries.front().sid);
      break;
    }
    case Scenario::S3: {
      auto& a = agents_[index_of(Role::analysis)];
      const auto attacker = derive_keys(config_.seed, "attacker");
      Certificate forged = a.cert();
      forged.model = binding(kSubstituteModel);
      forged.constraints.allowed_models = {std::string(kSubstituteModel)};
      forged = cert::sign_unchecked(std::move(forged), attacker.secret_key);
      a.chain.back() = forged;
      a.cert_hash = cert::certificate_hash(forged);
      a.runtime_model = forged.model;
      a.runtime = std::make_shared<repro::DeterministicExecutor>(forged.model);
      break;
    }
    case Scenario::S4:
    case Scenario::E2E3: {
      const auto writer = index_of(Role::writer);
      // A compromised issuer bypasses the checked issuance path.
      auto phantom = make_agent(agents_[writer].id + "/phantom", Role::sub, 0, &agents_[writer], Tier::T1, true);
      phantom.credential = {"cred-admin", Tier::T1, "vault://cred-admin"};
      const auto p = add_agent(std::move(phantom));
      script_.push_back({writer, p});
      break;
    }
    case Scenario::S7: {
      const auto review = index_of(Role::review);
      const auto second = add_agent(make_agent("review-b", Role::review, 1, &agents_.front()));
      joint_ = {review, second};
      joint_credential_ = "cred-prod-db";
      break;
    }
    case Scenario::S8: {
      auto& a = agents_[index_of(Role::research)];
      const auto fake_root_keys = derive_keys(config_.seed, "fake-root");
      cert::SubjectFields root_subject;
      root_subject.id = root_cert_.id;
      root_subject.public_key = fake_root_keys.public_key;
      root_subject.manifest_hash = root_cert_.manifest_hash;
      root_subject.constraints = root_cert_.constraints;
      root_subject.repro = root_cert_.repro;
      root_subject.governance_level = root_cert_.governance_level;
      root_subject.node_type = cert::NodeType::NA;
      root_subject.not_before = root_cert_.not_before;
      root_subject.not_after = root_cert_.not_after;
      const auto fake_root = cert::issue_root(root_subject, fake_root_keys.secret_key);
      Certificate leaf = a.cert();
      leaf.parent_id = fake_root.id;
      leaf = cert::sign_unchecked(std::move(leaf), fake_root_keys.secret_key);
      a.chain = {fake_root, leaf};
      a.cert_hash = cert::certificate_hash(leaf);
      break;
    }
    case Scenario::S9: {
      const auto research = index_of(Role::research);
      auto sub = make_agent(agents_[research].id + "/sub", Role::sub, 0, &agents_[research]);
      const auto sub_index = add_agent(std::move(sub));
      auto subsub = make_agent(agents_[sub_index].id + "/sub", Role::sub, 0, &agents_[sub_index], std::nullopt, true);
      const auto subsub_index = add_agent(std::move(subsub));
      script_.push_back({research, sub_index});
      script_.push_back({sub_index, subsub_index});
      break;
    }
    case Scenario::E2E2: {
      auto& a = agents_[index_of(Role::analysis)];
      a.runtime_model = binding(kSubstituteModel);
      a.runtime = std::make_shared<repro::DeterministicExecutor>(a.runtime_model);
      break;
    }
    case Scenario::E2E6: {
      const auto review = index_of(Role::review);
      const auto depth = agents_[review].cert().constraints.max_depth;
      auto child = make_agent(agents_[review].id + "/child", Role::sub, depth, &agents_[review], std::nullopt, true);
      const auto c = add_agent(std::move(child));
      script_.push_back({review, c});
      break;
    }
    case Scenario::E2E7: {
      auto& a = agents_[index_of(Role::analysis)];
      a.runtime = std::make_shared<repro::AdversarialExecutor>(a.runtime, 1.0, mix(config_.seed, "adversary", 0));
      break;
    }
    case Scenario::S5:
    case Scenario::S6:
    case Scenario::E2E4:
      break;  // applied to storage after the run
  }
}

bool Pipeline::authenticate(const Agent& a) const {
  const auto& chain = a.chain;
  auto anchor = anchors_.find(chain.front().id);
  if (anchor == anchors_.end() || anchor->second != chain.front().public_key) return false;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!cache_->verify(chain[i - 1].public_key, cert::signing_message(chain[i]), chain[i].issuer_signature)) {
      return false;
    }
  }
  const auto challenge = crypto::digest("govkit/auth-challenge/" + a.id);
  return crypto::verify_signature(a.cert().public_key, challenge.view(),
                                  crypto::sign(a.keys.secret_key, challenge.view()));
}

void Pipeline::governed_call(std::size_t index, const Call& call, RunReport& report) {
  auto& sender = agents_[call.sender];
  auto& receiver = agents_[call.receiver];
  const auto t = now(index);

  auto start = Clock::now();
  bool allowed = true;
  if (mode_ == GovernanceMode::full) {
    verifier::VerifyOptions options{receiver.runtime_model, cache_};
    auto decision = verifier::verify_access(receiver.chain, receiver.credential, receiver.runtime_manifest,
                                            anchors_, revocations_, t, options);
    if (!decision.allowed()) {
      allowed = false;
      report.detections.push_back({Layer::G1, std::string(verifier::to_string(decision.reason)), std::nullopt,
                                   receiver.id, decision.detail, std::nullopt});
    }
  } else if (mode_ == GovernanceMode::auth_only) {
    if (!authenticate(receiver)) {
      allowed = false;
      report.detections.push_back(
          {Layer::G1, "AUTH_FAILED", std::nullopt, receiver.id, "authentication failed", std::nullopt});
    }
  }
  report.timings.g1 += Clock::now() - start;
  if (!allowed) {
    ++report.denials;
    return;
  }

  const std::string input = sender.role == Role::coordinator || sender.last_output.empty()
                                ? "task " + std::to_string(config_.seed) + "." + std::to_string(index) + " for " +
                                      receiver.id + ": summarize recent findings on " + sender.id
                                : sender.last_output;
  const auto call_seed = mix(config_.seed, "call", index);
  auto output = receiver.runtime->execute(as_bytes(input), call_seed, receiver.cert().repro.config);
  if (config_.tool_latency.count() > 0) std::this_thread::sleep_for(config_.tool_latency);
  ++report.governed_calls;

  start = Clock::now();
  ledger::AppendRequest request;
  if (mode_ == GovernanceMode::full) {
    const auto in = crypto::digest(input);
    const auto out = crypto::digest(output);
    request.timestamp = t;
    request.sender_id = sender.id;
    request.receiver_id = receiver.id;
    request.sender_cert_hash.assign(sender.cert_hash.bytes.begin(), sender.cert_hash.bytes.end());
    request.receiver_cert_hash.assign(receiver.cert_hash.bytes.begin(), receiver.cert_hash.bytes.end());
    request.input_commitment.assign(in.bytes.begin(), in.bytes.end());
    request.output_commitment.assign(out.bytes.begin(), out.bytes.end());
    request.anchor = {call_seed, receiver.cert().model.model_ver, receiver.cert().manifest_hash};
  }
  report.timings.g2 += Clock::now() - start;

  start = Clock::now();
  if (mode_ == GovernanceMode::full) {
    auto record = ledger_.append(request, sender.keys.secret_key, receiver.keys.secret_key);
    disclosures_[record.seq] = {input, output};
  } else if (mode_ == GovernanceMode::trace_only) {
    traces_.push_back({sender.id, receiver.id, input, output});
  }
  report.timings.g3 += Clock::now() - start;
  receiver.last_output = std::move(output);
}

void Pipeline::joint_request(RunReport& report) {
  if (joint_.empty()) return;
  const verifier::Credential credential{joint_credential_, Tier::T1, "vault://" + joint_credential_};
  const auto start = Clock::now();
  if (mode_ == GovernanceMode::full) {
    std::vector<verifier::AgentContext> contexts;
    for (auto i : joint_) contexts.push_back({agents_[i].chain, agents_[i].runtime_manifest, agents_[i].runtime_model});
    auto decision = verifier::combined_access(contexts, credential, anchors_, revocations_, now(script_.size()), cache_);
    if (!decision.allowed()) {
      ++report.denials;
      report.detections.push_back({Layer::G1, std::string(verifier::to_string(decision.reason)), std::nullopt,
                                   agents_[joint_.front()].id + "+" + agents_[joint_.back()].id, decision.detail, std::nullopt});
    }
  }
  report.timings.g1 += Clock::now() - start;
}

Bytes Pipeline::tamper(Bytes storage, Scenario s) const {
  auto records = ledger::parse_storage(storage);
  if (records.size() < 2) return storage;
  const std::size_t k = std::min<std::size_t>(2, records.size() - 2);  // interior record, 0-based
  auto& r = records[k];
  r.output_commitment.bytes[0] ^= 0x01;
  auto key_of = [&](const std::string& id) -> const crypto::SecretKey& {
    for (const auto& a : agents_) {
      if (a.id == id) return a.keys.secret_key;
    }
    throw Error(ErrorCode::invalid_argument, "unknown agent " + id);
  };
  const auto msg = ledger::signing_message(r);
  if (s == Scenario::S6 || s == Scenario::E2E4) r.sender_sig = crypto::sign(key_of(r.sender_id), msg);
  if (s == Scenario::E2E4) r.receiver_sig = crypto::sign(key_of(r.receiver_id), msg);
  Bytes out;
  for (const auto& rec : records) ledger::append_frame(out, ledger::encode_record(rec));
  return out;
}

void Pipeline::post_run(RunReport& report) {
  const bool tampering = scenario_ && (*scenario_ == Scenario::S5 || *scenario_ == Scenario::S6 ||
                                       *scenario_ == Scenario::E2E4);
  if (mode_ == GovernanceMode::trace_only && tampering && traces_.size() > 2) {
    traces_[2].output += " [edited]";  // nothing binds the trace, so nothing notices
  }
  if (mode_ != GovernanceMode::full) return;

  auto storage = ledger_.serialize();
  report.storage_bytes = storage.size();
  if (tampering) storage = tamper(std::move(storage), *scenario_);
  report.audit = ledger::audit_storage(storage, keys_);
  if (!report.audit.ok) {
    report.detections.push_back({Layer::G3, std::string(ledger::to_string(*report.audit.failure)),
                                 report.audit.first_bad_seq, "ledger", report.audit.detail, std::nullopt});
  }

  for (const auto& r : ledger_.snapshot()) {
    auto it = std::find_if(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.id == r.receiver_id; });
    if (it == agents_.end() || it->cert().repro.level == ReproLevel::none) continue;
    const auto& d = disclosures_.at(r.seq);
    auto verdict = repro::replay_verify(it->cert(), r, d.output, as_bytes(d.input), *it->honest);
    if (verdict.verdict == repro::ReplayOutcome::VIOLATION) {
      report.detections.push_back({Layer::G2, "VIOLATION", r.seq, it->id,
                                   "char_match " + std::to_string(verdict.report->scores.char_match) + " < theta " +
                                       (verdict.theta ? std::to_string(*verdict.theta) : std::string("(exact)")),
                                   verdict.report->scores.char_match});
    } else if (verdict.verdict == repro::ReplayOutcome::VERIFIED) {
      ++report.replays_verified;
    }
  }
}

RunReport Pipeline::run() {
  RunReport report;
  report.scenario = scenario_;
  report.mode = mode_;
  report.agent_count = config_.agent_count;
  for (std::size_t i = 0; i < script_.size(); ++i) governed_call(i, script_[i], report);
  joint_request(report);
  report.ledger_entries = mode_ == GovernanceMode::full ? ledger_.size() : traces_.size();
  post_run(report);
  if (scenario_) {
    const auto& spec = scenario_spec(*scenario_);
    report.false_positive_count = static_cast<std::size_t>(
        std::count_if(report.detections.begin(), report.detections.end(), [&](const Detection& d) {
          return !(d.layer == spec.expected_layer && d.reason == spec.expected_reason);
        }));
  } else {
    report.false_positive_count = report.detections.size();
  }
  return report;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
    case Scenario::S4: return "S4";
    case Scenario::S5: return "S5";
    case Scenario::S6: return "S6";
    case Scenario::S7: return "S7";
    case Scenario::S8: return "S8";
    case Scenario::S9: return "S9";
    case Scenario::E2E1: return "E2E1";
    case Scenario::E2E2: return "E2E2";
    case Scenario::E2E3: return "E2E3";
    case Scenario::E2E4: return "E2E4";
    case Scenario::E2E5: return "E2E5";
    case Scenario::E2E6: return "E2E6";
    case Scenario::E2E7: return "E2E7";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view name) {
  std::string normalized;
  for (char c : name) {
    if (c != '-') normalized.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (const auto& spec : kSpecs) {
    if (to_string(spec.id) == normalized) return spec.id;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::G1: return "G1";
    case Layer::G2: return "G2";
    case Layer::G3: return "G3";
  }
  return "?";
}

std::string_view to_string(GovernanceMode mode) {
  switch (mode) {
    case GovernanceMode::none: return "none";
    case GovernanceMode::auth_only: return "auth-only";
    case GovernanceMode::trace_only: return "trace-only";
    case GovernanceMode::full: return "full";
  }
  return "?";
}

const ScenarioSpec& scenario_spec(Scenario scenario) {
  for (const auto& spec : kSpecs) {
    if (spec.id == scenario) return spec;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scenario");
}

bool RunReport::detected_as_expected() const {
  if (!scenario) return false;
  const auto& spec = scenario_spec(*scenario);
  return std::any_of(detections.begin(), detections.end(), [&](const Detection& d) {
    return d.layer == spec.expected_layer && d.reason == spec.expected_reason;
  });
}

std::vector<cert::Certificate> topology_certificates(const PipelineConfig& config) {
  return Pipeline(config, GovernanceMode::full, nullptr).certificates();
}

RunReport run_clean_pipeline(const PipelineConfig& config) {
  Pipeline pipeline(config, GovernanceMode::full, nullptr);
  return pipeline.run();
}

RunReport run_attack(const PipelineConfig& config, Scenario scenario, GovernanceMode mode) {
  Pipeline pipeline(config, mode, nullptr);
  pipeline.inject(scenario);
  return pipeline.run();
}

BaselineMatrix run_baseline_comparison(const PipelineConfig& config, const std::vector<Scenario>& scenarios) {
  BaselineMatrix out;
  for (auto mode : {GovernanceMode::none, GovernanceMode::auth_only, GovernanceMode::trace_only,
                    GovernanceMode::full}) {
    for (auto s : scenarios) out[mode][s] = run_attack(config, s, mode).detected_as_expected();
  }
  return out;
}

std::vector<ScalingRow> measure_overhead(const std::vector<std::size_t>& agent_counts, std::size_t repetitions,
                                         bool durable, const std::filesystem::path& scratch_dir) {
  std::vector<ScalingRow> rows;
  crypto::SignatureCache cache;
  for (auto n : agent_counts) {
    ScalingRow row;
    row.agent_count = n;
    LayerTimings sum;
    // One warm-up run populates the certificate signature cache, as a
    // long-lived verifier would have.
    for (std::size_t rep = 0; rep <= repetitions; ++rep) {
      PipelineConfig config;
      config.agent_count = n;
      config.seed = 1;
      config.durable = durable;
      const auto path = scratch_dir / ("overhead-" + std::to_string(n) + "-" + std::to_string(rep) + ".ledger");
      std::filesystem::remove(path);
      config.ledger_path = path;
      RunReport report;
      {
        Pipeline pipeline(config, GovernanceMode::full, &cache);
        report = pipeline.run();
      }
      std::filesystem::remove(path);
      if (rep == 0) continue;
      sum.g1 += report.timings.g1;
      sum.g2 += report.timings.g2;
      sum.g3 += report.timings.g3;
      row.ledger_entries = report.ledger_entries;
      row.storage_bytes = report.storage_bytes;
    }
    const auto reps = static_cast<std::int64_t>(std::max<std::size_t>(repetitions, 1));
    row.mean = {sum.g1 / reps, sum.g2 / reps, sum.g3 / reps};
    const double total_ms = std::chrono::duration<double, std::milli>(row.mean.total()).count();
    row.per_agent_ms = total_ms / static_cast<double>(n);
    row.g3_share = total_ms > 0 ? std::chrono::duration<double, std::milli>(row.mean.g3).count() / total_ms : 0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace govkit::harness
