#pragma once

// Shared fixtures: frozen oracles and a small PKI.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "govkit/certificates.hpp"
#include "govkit/crypto.hpp"
#include "govkit/ledger.hpp"

namespace testsupport {

using namespace govkit;
using Json = nlohmann::json;

inline const Json& oracles() {
  static const Json j = [] {
    std::ifstream in(std::string(GOVKIT_GOLDEN_DIR) + "/oracles.json");
    std::stringstream ss;
    ss << in.rdbuf();
    return Json::parse(ss.str());
  }();
  return j;
}

inline std::string golden_path(const std::string& name) { return std::string(GOVKIT_GOLDEN_DIR) + "/" + name; }

inline crypto::KeyPair key(std::string_view label) {
  return crypto::generate_keypair(crypto::digest(std::string("test-key/") + std::string(label)).view());
}

inline constexpr cert::Timestamp kNow = 1'767'225'600'000;
inline constexpr cert::Timestamp kDay = 86'400'000;

inline cert::ModelBinding model(std::string_view id) { return {"mockai", std::string(id), "2025-01"}; }

inline cert::SkillsManifest manifest(std::initializer_list<std::string_view> tools) {
  cert::SkillsManifest m;
  for (auto t : tools) m.entries.push_back({std::string(t), "1.0", cert::descriptor_hash(t, "1.0", "schema"), {"scope"}});
  return cert::normalize(std::move(m));
}

inline cert::SubjectFields anchor_subject(const std::string& id, const crypto::KeyPair& k, std::uint32_t depth = 4) {
  cert::SubjectFields s;
  s.id = id;
  s.public_key = k.public_key;
  s.manifest_hash = cert::manifest_hash({});
  s.constraints = {cert::Tier::T0, depth, {"m-a", "m-b", "m-c"}, cert::Rate::make(1000, 1)};
  s.repro.level = cert::ReproLevel::full;
  s.governance_level = cert::GovernanceLevel::L3_compiletime;
  s.node_type = cert::NodeType::NA;
  s.not_before = kNow - 30 * kDay;
  s.not_after = kNow + 365 * kDay;
  return s;
}

inline cert::SubjectFields agent_subject(const std::string& id, const crypto::KeyPair& k, cert::Tier tier,
                                         std::uint32_t depth, std::string_view model_id = "m-a",
                                         cert::ReproLevel level = cert::ReproLevel::full) {
  cert::SubjectFields s;
  s.id = id;
  s.public_key = k.public_key;
  s.model = model(model_id);
  s.manifest_hash = cert::manifest_hash(manifest({"search"}));
  s.constraints = {tier, depth, {std::string(model_id)}, cert::Rate::make(10, 1)};
  s.repro.level = level;
  if (level == cert::ReproLevel::statistical) s.repro.config["theta"] = "0.85";
  s.governance_level = level == cert::ReproLevel::full ? cert::GovernanceLevel::L3_compiletime
                                                       : cert::GovernanceLevel::L2_sampled;
  s.node_type = cert::NodeType::AG;
  s.not_before = kNow - kDay;
  s.not_after = kNow + 30 * kDay;
  return s;
}

// Unsigned certificate body with the subject's fields under `parent_id`.
inline cert::Certificate body_of(const cert::SubjectFields& s, const std::string& parent_id) {
  cert::Certificate c;
  c.id = s.id;
  c.parent_id = parent_id;
  c.public_key = s.public_key;
  c.model = s.model;
  c.manifest_hash = s.manifest_hash;
  c.constraints = s.constraints;
  c.repro = s.repro;
  c.governance_level = s.governance_level;
  c.node_type = s.node_type;
  c.not_before = s.not_before;
  c.not_after = s.not_after;
  return c;
}

// root (NA, T0, depth 4) -> org (NA, depth 3) -> agent (AG, T2, depth 2) -> leaf (AG, T2, depth 1).
struct Pki {
  crypto::KeyPair root_key = key("root");
  crypto::KeyPair org_key = key("org");
  crypto::KeyPair agent_key = key("agent");
  crypto::KeyPair leaf_key = key("leaf");
  cert::Certificate root, org, agent, leaf;

  Pki() {
    root = cert::issue_root(anchor_subject("root", root_key), root_key.secret_key);
    org = cert::issue_certificate(root, root_key.secret_key, anchor_subject("org", org_key, 3), kNow);
    auto a = agent_subject("agent", agent_key, cert::Tier::T2, 2);
    a.constraints.allowed_models = {"m-a", "m-b"};
    agent = cert::issue_certificate(org, org_key.secret_key, a, kNow);
    leaf = cert::issue_certificate(agent, agent_key.secret_key, agent_subject("leaf", leaf_key, cert::Tier::T2, 1),
                                   kNow);
  }

  std::vector<cert::Certificate> chain() const { return {root, org, agent, leaf}; }
};

inline Bytes digest_bytes(std::string_view s) {
  const auto d = crypto::digest(s);
  return Bytes(d.bytes.begin(), d.bytes.end());
}

inline ledger::AppendRequest request(const std::string& sender, const std::string& receiver, std::uint64_t i) {
  ledger::AppendRequest r;
  r.timestamp = kNow + i;
  r.sender_id = sender;
  r.receiver_id = receiver;
  r.sender_cert_hash = digest_bytes("cert/" + sender);
  r.receiver_cert_hash = digest_bytes("cert/" + receiver);
  r.input_commitment = digest_bytes("in/" + std::to_string(i));
  r.output_commitment = digest_bytes("out/" + std::to_string(i));
  r.anchor = {i, "2025-01", crypto::digest("skills")};
  return r;
}

}  // namespace testsupport
