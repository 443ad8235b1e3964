#pragma once

// Four-phase access verification over root-to-leaf certificate chains,
// revocation, reproducibility tier downgrade and trust-tree validation.

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "govkit/certificates.hpp"

namespace govkit::verifier {

using cert::Certificate;
using cert::SkillsManifest;
using cert::Tier;
using cert::Timestamp;

enum class Verdict { ALLOW, DENY };

enum class Reason {
  OK,
  UNTRUSTED_ROOT,
  BAD_SIGNATURE,
  CONSTRAINT_VIOLATION,
  MANIFEST_MISMATCH,
  MODEL_MISMATCH,
  TIER_EXCEEDED,
  REVOKED,
  EXPIRED,
  TYPE_CONSTRAINT,
  DEPTH_EXHAUSTED,
};

std::string_view to_string(Verdict verdict);
std::string_view to_string(Reason reason);

struct AccessDecision {
  Verdict verdict = Verdict::DENY;
  Reason reason = Reason::UNTRUSTED_ROOT;
  std::optional<int> phase;
  std::string detail;

  bool allowed() const { return verdict == Verdict::ALLOW; }

  static AccessDecision allow() { return {Verdict::ALLOW, Reason::OK, std::nullopt, {}}; }
  static AccessDecision deny(Reason reason, int phase, std::string detail) {
    return {Verdict::DENY, reason, phase, std::move(detail)};
  }
};

struct Credential {
  std::string id;
  Tier tier = Tier::T3;
  std::string secret_ref;
};

// Trusted roots by id. A chain is anchored only if its first certificate's id
// and public key both match an entry.
using TrustAnchors = std::map<std::string, cert::PublicKey>;

TrustAnchors anchors_from(std::span<const Certificate> roots);

// Append-only map of certificate id to revocation time. Reads may run
// concurrently with a writer and observe either the old or new state.
class RevocationRegistry {
 public:
  RevocationRegistry() = default;
  RevocationRegistry(const RevocationRegistry& other);
  RevocationRegistry& operator=(const RevocationRegistry& other);

  // Keeps the earliest time when an id is revoked more than once.
  void revoke(const std::string& cert_id, Timestamp at);
  std::optional<Timestamp> revoked_at(const std::string& cert_id) const;
  // Revocation takes effect at `at` inclusive.
  bool is_revoked(const std::string& cert_id, Timestamp now) const;
  std::map<std::string, Timestamp> entries() const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Timestamp> revoked_;
};

struct VerifyOptions {
  // Model the agent is actually running; compared with the leaf binding in
  // phase 2 when present.
  std::optional<cert::ModelBinding> runtime_model;
  // Optional memo for chain signatures that already verified.
  crypto::SignatureCache* cache = nullptr;
};

// ρ = none costs one tier of privilege: T0→T1, T1→T2, T2→T3, T3 stays T3.
Tier effective_tier(const Certificate& cert);

// Phases: (1) chain integrity: anchored root, per-link signatures, type
// constraint, depth, constraint ordering, validity windows; (2) capability
// binding: runtime manifest hash and model; (3) credential tier against the
// leaf's effective tier; (4) revocation of any chain member. Total: every
// failure is a DENY naming the first failing phase.
AccessDecision verify_access(std::span<const Certificate> chain, const Credential& credential,
                             const SkillsManifest& runtime_manifest, const TrustAnchors& anchors,
                             const RevocationRegistry& revocations, Timestamp now,
                             const VerifyOptions& options = {});

// One agent's view for a joint request.
struct AgentContext {
  std::vector<Certificate> chain;
  SkillsManifest runtime_manifest;
  std::optional<cert::ModelBinding> runtime_model;
};

// ALLOW iff some agent is individually allowed; permissions never combine.
// When all deny, reports the denial that got furthest through the phases
// (earliest agent on ties). An empty set denies with UNTRUSTED_ROOT.
AccessDecision combined_access(std::span<const AgentContext> agents, const Credential& credential,
                               const TrustAnchors& anchors, const RevocationRegistry& revocations,
                               Timestamp now, crypto::SignatureCache* cache = nullptr);

struct TrustTree {
  std::map<std::string, Certificate> nodes;
  std::set<std::string> root_ids;

  // Throws Error(duplicate_entry) when the id is already present.
  void add(Certificate cert);
  // Parent-to-child pairs derived from parent_id, roots excluded.
  std::vector<std::pair<std::string, std::string>> edges() const;
  std::vector<std::string> children(const std::string& id) const;
  // Root-to-node chain; empty if the node is unknown, orphaned or cyclic.
  std::vector<Certificate> chain_to(const std::string& id) const;
};

struct TreeViolation {
  std::string parent_id;
  std::string child_id;
  Reason rule;
  std::string detail;
};

// Empty iff every root is trusted and self-signed, every edge is signed by
// the parent, respects the type constraint and the propagation rule, and
// every node is reachable from a trusted root.
std::vector<TreeViolation> validate_tree(const TrustTree& tree);

}  // namespace govkit::verifier
