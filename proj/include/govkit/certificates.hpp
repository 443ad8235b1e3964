#pragma once

// Capability-bound certificates: the skills manifest and its canonical hash,
// trust constraints and their partial order, issuance under the propagation
// rule, and the wire/file encodings.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "govkit/crypto.hpp"

namespace govkit::cert {

using crypto::Digest;
using crypto::PublicKey;
using crypto::SecretKey;
using crypto::Signature;

// Milliseconds since the Unix epoch, UTC.
using Timestamp = std::uint64_t;

// Risk tiers. T0 is the most sensitive (human-only); a larger number means a
// less privileged tier.
enum class Tier : std::uint8_t { T0 = 0, T1 = 1, T2 = 2, T3 = 3 };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view name);

// True when `a` grants no more privilege than `b` (numerically a >= b).
constexpr bool tier_within(Tier a, Tier b) {
  return static_cast<int>(a) >= static_cast<int>(b);
}

enum class NodeType : std::uint8_t { NA = 0, AG = 1 };
std::string_view to_string(NodeType type);
NodeType node_type_from_string(std::string_view name);

enum class ReproLevel : std::uint8_t { full = 0, statistical = 1, none = 2 };
std::string_view to_string(ReproLevel level);
ReproLevel repro_level_from_string(std::string_view name);

enum class GovernanceLevel : std::uint8_t { L1_posthoc = 1, L2_sampled = 2, L3_compiletime = 3 };
std::string_view to_string(GovernanceLevel level);
GovernanceLevel governance_level_from_string(std::string_view name);

struct SkillEntry {
  std::string sid;
  std::string ver;
  Digest h;
  std::vector<std::string> scopes;

  friend bool operator==(const SkillEntry&, const SkillEntry&) = default;
};

struct SkillsManifest {
  std::vector<SkillEntry> entries;

  friend bool operator==(const SkillsManifest&, const SkillsManifest&) = default;
};

// Sorts entries by (sid, ver) and each scope list ascending without
// duplicates. Throws Error(duplicate_entry) on a repeated (sid, ver) and
// Error(invalid_argument) on an empty sid.
SkillsManifest normalize(SkillsManifest manifest);

// Array of 4-element arrays [sid, ver, h, scopes] over the normalized entries.
Bytes canonical_encode(const SkillsManifest& manifest);
Digest manifest_hash(const SkillsManifest& manifest);

// h for a closed-source tool: digest of "name|version|api-schema".
Digest descriptor_hash(std::string_view name, std::string_view version, std::string_view api_schema);

// Non-negative rational requests/sec, kept in lowest terms.
struct Rate {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rate make(std::uint64_t num, std::uint64_t den);
  // Accepts "7", "5/2" or a finite decimal such as "2.5".
  static Rate parse(std::string_view text);
  std::string str() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rate&, const Rate&) = default;
  friend bool operator<=(const Rate& a, const Rate& b);
};

struct TrustConstraints {
  Tier max_tier = Tier::T3;
  std::uint32_t max_depth = 0;
  std::set<std::string> allowed_models;
  Rate max_rate;

  friend bool operator==(const TrustConstraints&, const TrustConstraints&) = default;
};

// a <=_k b: no more privileged tier, strictly smaller depth, subset of
// models, no higher rate.
bool constraint_leq(const TrustConstraints& a, const TrustConstraints& b);

struct ReproCommitment {
  ReproLevel level = ReproLevel::none;
  std::map<std::string, std::string> config;

  // Value of config["theta"] when present and parseable.
  std::optional<double> theta() const;

  friend bool operator==(const ReproCommitment&, const ReproCommitment&) = default;
};

struct ModelBinding {
  std::string provider;
  std::string model_id;
  std::string model_ver;

  bool empty() const { return provider.empty() && model_id.empty() && model_ver.empty(); }
  friend bool operator==(const ModelBinding&, const ModelBinding&) = default;
};

struct Certificate {
  std::string id;
  std::string parent_id;
  PublicKey public_key;
  ModelBinding model;
  Digest manifest_hash;
  TrustConstraints constraints;
  ReproCommitment repro;
  GovernanceLevel governance_level = GovernanceLevel::L1_posthoc;
  NodeType node_type = NodeType::AG;
  Timestamp not_before = 0;
  Timestamp not_after = 0;
  Signature issuer_signature;

  bool is_root() const { return parent_id == id; }
  bool valid_at(Timestamp now) const { return not_before <= now && now < not_after; }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

// Field-domain checks shared by issuance and decoding: t_s < t_e, statistical
// commitments carry a theta in (0, 1], L3 requires full reproducibility, agent
// nodes carry a complete model binding. Throws Error(invalid_certificate).
void validate_fields(const Certificate& cert);

// Deterministic CBOR of every field except the signature, in declaration order.
Bytes encode_body(const Certificate& cert);
// Message the issuer signs: a fixed context label followed by encode_body.
Bytes signing_message(const Certificate& cert);

Bytes encode_certificate(const Certificate& cert);
// Throws Error(malformed) on anything that is not a well-formed encoding.
Certificate decode_certificate(ByteView bytes);

// Digest of the full encoded certificate (what ledger records bind to).
Digest certificate_hash(const Certificate& cert);

std::string to_pem(const Certificate& cert);
Certificate from_pem(std::string_view text);
// Reads every certificate envelope in `text`, in order.
std::vector<Certificate> all_from_pem(std::string_view text);

struct SubjectFields {
  std::string id;
  PublicKey public_key;
  ModelBinding model;
  Digest manifest_hash;
  TrustConstraints constraints;
  ReproCommitment repro;
  GovernanceLevel governance_level = GovernanceLevel::L1_posthoc;
  NodeType node_type = NodeType::AG;
  Timestamp not_before = 0;
  Timestamp not_after = 0;
};

// Self-signed NA trust anchor (parent_id == id).
Certificate issue_root(const SubjectFields& subject, const SecretKey& root_key);

// Issues `subject` under `issuer`. Checks, in order: issuer key matches,
// issuer valid at `now` (expired_issuer), AG issuers only issue AG
// (type_constraint), issuer depth above zero (depth_exhausted), subject
// constraints <=_k issuer constraints (constraint_violation).
Certificate issue_certificate(const Certificate& issuer, const SecretKey& issuer_key,
                              const SubjectFields& subject, Timestamp now);

// Signs an arbitrary body with `key` without any propagation checks. Used to
// model adversaries and to build negative fixtures.
Certificate sign_unchecked(Certificate body, const SecretKey& key);

}  // namespace govkit::cert
