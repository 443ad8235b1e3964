#include "govkit/verifier.hpp"

#include <algorithm>
#include <mutex>

#include "govkit/error.hpp"

namespace govkit::verifier {

namespace {

bool signature_ok(const cert::PublicKey& key, const Certificate& c, crypto::SignatureCache* cache) {
  const auto msg = cert::signing_message(c);
  return cache ? cache->verify(key, msg, c.issuer_signature)
               : crypto::verify_signature(key, msg, c.issuer_signature);
}

std::string window_text(const Certificate& c, Timestamp now) {
  return "'" + c.id + "' valid [" + std::to_string(c.not_before) + ", " + std::to_string(c.not_after) +
         "), now " + std::to_string(now);
}

// Edge-local rules shared by chain verification and tree validation.
std::optional<std::pair<Reason, std::string>> check_edge(const Certificate& parent, const Certificate& child,
                                                         crypto::SignatureCache* cache) {
  if (child.parent_id != parent.id) {
    return std::pair{Reason::BAD_SIGNATURE, "'" + child.id + "' names parent '" + child.parent_id +
                                                "', chain predecessor is '" + parent.id + "'"};
  }
  if (!signature_ok(parent.public_key, child, cache)) {
    return std::pair{Reason::BAD_SIGNATURE, "signature on '" + child.id + "' does not verify under '" +
                                                parent.id + "'"};
  }
  if (parent.node_type == cert::NodeType::AG && child.node_type != cert::NodeType::AG) {
    return std::pair{Reason::TYPE_CONSTRAINT, "agent '" + parent.id + "' certifies non-agent '" + child.id + "'"};
  }
  if (parent.constraints.max_depth == 0) {
    return std::pair{Reason::DEPTH_EXHAUSTED, "'" + parent.id + "' has max_depth 0 but issued '" + child.id + "'"};
  }
  if (!cert::constraint_leq(child.constraints, parent.constraints)) {
    return std::pair{Reason::CONSTRAINT_VIOLATION,
                     "constraints of '" + child.id + "' are not below those of '" + parent.id + "'"};
  }
  const auto& allowed = child.constraints.allowed_models;
  if (child.node_type == cert::NodeType::AG && !allowed.empty() && !allowed.contains(child.model.model_id)) {
    return std::pair{Reason::CONSTRAINT_VIOLATION,
                     "model '" + child.model.model_id + "' of '" + child.id + "' is not in its allowed_models"};
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Verdict verdict) { return verdict == Verdict::ALLOW ? "ALLOW" : "DENY"; }

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::OK: return "OK";
    case Reason::UNTRUSTED_ROOT: return "UNTRUSTED_ROOT";
    case Reason::BAD_SIGNATURE: return "BAD_SIGNATURE";
    case Reason::CONSTRAINT_VIOLATION: return "CONSTRAINT_VIOLATION";
    case Reason::MANIFEST_MISMATCH: return "MANIFEST_MISMATCH";
    case Reason::MODEL_MISMATCH: return "MODEL_MISMATCH";
    case Reason::TIER_EXCEEDED: return "TIER_EXCEEDED";
    case Reason::REVOKED: return "REVOKED";
    case Reason::EXPIRED: return "EXPIRED";
    case Reason::TYPE_CONSTRAINT: return "TYPE_CONSTRAINT";
    case Reason::DEPTH_EXHAUSTED: return "DEPTH_EXHAUSTED";
  }
  return "UNKNOWN";
}

TrustAnchors anchors_from(std::span<const Certificate> roots) {
  TrustAnchors out;
  for (const auto& r : roots) out[r.id] = r.public_key;
  return out;
}

RevocationRegistry::RevocationRegistry(const RevocationRegistry& other) : revoked_(other.entries()) {}

RevocationRegistry& RevocationRegistry::operator=(const RevocationRegistry& other) {
  if (this != &other) {
    auto copy = other.entries();
    std::unique_lock lock(mutex_);
    revoked_ = std::move(copy);
  }
  return *this;
}

void RevocationRegistry::revoke(const std::string& cert_id, Timestamp at) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = revoked_.emplace(cert_id, at);
  if (!inserted) it->second = std::min(it->second, at);
}

std::optional<Timestamp> RevocationRegistry::revoked_at(const std::string& cert_id) const {
  std::shared_lock lock(mutex_);
  auto it = revoked_.find(cert_id);
  if (it == revoked_.end()) return std::nullopt;
  return it->second;
}

bool RevocationRegistry::is_revoked(const std::string& cert_id, Timestamp now) const {
  auto at = revoked_at(cert_id);
  return at && *at <= now;
}

std::map<std::string, Timestamp> RevocationRegistry::entries() const {
  std::shared_lock lock(mutex_);
  return revoked_;
}

std::size_t RevocationRegistry::size() const {
  std::shared_lock lock(mutex_);
  return revoked_.size();
}

Tier effective_tier(const Certificate& c) {
  const auto t = c.constraints.max_tier;
  if (c.repro.level != cert::ReproLevel::none || t == Tier::T3) return t;
  return static_cast<Tier>(static_cast<int>(t) + 1);
}

AccessDecision verify_access(std::span<const Certificate> chain, const Credential& credential,
                             const SkillsManifest& runtime_manifest, const TrustAnchors& anchors,
                             const RevocationRegistry& revocations, Timestamp now,
                             const VerifyOptions& options) {
  // Phase 1: chain integrity.
  if (chain.empty()) return AccessDecision::deny(Reason::UNTRUSTED_ROOT, 1, "empty chain");
  const auto& root = chain.front();
  auto anchor = anchors.find(root.id);
  if (anchor == anchors.end() || anchor->second != root.public_key) {
    return AccessDecision::deny(Reason::UNTRUSTED_ROOT, 1, "'" + root.id + "' is not a trusted root key");
  }
  if (!root.is_root() || root.node_type != cert::NodeType::NA) {
    return AccessDecision::deny(Reason::UNTRUSTED_ROOT, 1, "'" + root.id + "' is not a self-issued NA anchor");
  }
  if (!signature_ok(root.public_key, root, options.cache)) {
    return AccessDecision::deny(Reason::BAD_SIGNATURE, 1, "root '" + root.id + "' self-signature is invalid");
  }
  if (!root.valid_at(now)) return AccessDecision::deny(Reason::EXPIRED, 1, window_text(root, now));
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (auto bad = check_edge(chain[i - 1], chain[i], options.cache)) {
      return AccessDecision::deny(bad->first, 1, std::move(bad->second));
    }
    if (!chain[i].valid_at(now)) return AccessDecision::deny(Reason::EXPIRED, 1, window_text(chain[i], now));
  }

  // Phase 2: capability binding.
  const auto& leaf = chain.back();
  if (cert::manifest_hash(runtime_manifest) != leaf.manifest_hash) {
    return AccessDecision::deny(Reason::MANIFEST_MISMATCH, 2,
                                "runtime skills manifest of '" + leaf.id + "' differs from the certified hash");
  }
  if (options.runtime_model && *options.runtime_model != leaf.model) {
    return AccessDecision::deny(Reason::MODEL_MISMATCH, 2,
                                "runtime model '" + options.runtime_model->model_id + "' is not certified model '" +
                                    leaf.model.model_id + "'");
  }

  // Phase 3: credential tier.
  const auto allowed_tier = effective_tier(leaf);
  if (!cert::tier_within(credential.tier, allowed_tier)) {
    return AccessDecision::deny(Reason::TIER_EXCEEDED, 3,
                                "credential '" + credential.id + "' is " + std::string(cert::to_string(credential.tier)) +
                                    ", '" + leaf.id + "' may use " + std::string(cert::to_string(allowed_tier)) +
                                    " and below");
  }

  // Phase 4: revocation.
  for (const auto& c : chain) {
    if (revocations.is_revoked(c.id, now)) {
      return AccessDecision::deny(Reason::REVOKED, 4, "'" + c.id + "' is revoked");
    }
  }
  return AccessDecision::allow();
}

AccessDecision combined_access(std::span<const AgentContext> agents, const Credential& credential,
                               const TrustAnchors& anchors, const RevocationRegistry& revocations,
                               Timestamp now, crypto::SignatureCache* cache) {
  AccessDecision best{Verdict::DENY, Reason::UNTRUSTED_ROOT, std::nullopt, "no agents in request"};
  for (const auto& agent : agents) {
    VerifyOptions options{agent.runtime_model, cache};
    auto d = verify_access(agent.chain, credential, agent.runtime_manifest, anchors, revocations, now, options);
    if (d.allowed()) return d;
    if (!best.phase || d.phase.value_or(0) > *best.phase) best = std::move(d);
  }
  return best;
}

void TrustTree::add(Certificate c) {
  auto id = c.id;
  if (!nodes.emplace(id, std::move(c)).second) {
    throw Error(ErrorCode::duplicate_entry, "trust tree already contains '" + id + "'");
  }
}

std::vector<std::pair<std::string, std::string>> TrustTree::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [id, c] : nodes) {
    if (!c.is_root()) out.emplace_back(c.parent_id, id);
  }
  return out;
}

std::vector<std::string> TrustTree::children(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& [child_id, c] : nodes) {
    if (!c.is_root() && c.parent_id == id) out.push_back(child_id);
  }
  return out;
}

std::vector<Certificate> TrustTree::chain_to(const std::string& id) const {
  std::vector<Certificate> out;
  auto it = nodes.find(id);
  while (it != nodes.end() && out.size() <= nodes.size()) {
    out.push_back(it->second);
    if (it->second.is_root()) {
      std::reverse(out.begin(), out.end());
      return out;
    }
    it = nodes.find(it->second.parent_id);
  }
  return {};
}

std::vector<TreeViolation> validate_tree(const TrustTree& tree) {
  std::vector<TreeViolation> out;
  for (const auto& [id, c] : tree.nodes) {
    if (c.is_root()) {
      if (!tree.root_ids.contains(id) || c.node_type != cert::NodeType::NA) {
        out.push_back({id, id, Reason::UNTRUSTED_ROOT, "'" + id + "' is not a trusted NA root"});
      } else if (!signature_ok(c.public_key, c, nullptr)) {
        out.push_back({id, id, Reason::BAD_SIGNATURE, "root '" + id + "' self-signature is invalid"});
      }
      continue;
    }
    auto parent = tree.nodes.find(c.parent_id);
    if (parent == tree.nodes.end()) {
      out.push_back({c.parent_id, id, Reason::UNTRUSTED_ROOT, "parent '" + c.parent_id + "' is not in the tree"});
      continue;
    }
    if (auto bad = check_edge(parent->second, c, nullptr)) {
      out.push_back({c.parent_id, id, bad->first, std::move(bad->second)});
    }
    if (tree.chain_to(id).empty() && tree.nodes.contains(c.parent_id)) {
      // Parent exists but the ancestry never reaches a root: a cycle.
      auto walk = tree.nodes.find(c.parent_id);
      bool reaches_orphan = false;
      for (std::size_t steps = 0; walk != tree.nodes.end() && steps <= tree.nodes.size(); ++steps) {
        if (walk->second.is_root()) break;
        auto next = tree.nodes.find(walk->second.parent_id);
        if (next == tree.nodes.end()) reaches_orphan = true;
        walk = next;
      }
      if (!reaches_orphan) {
        out.push_back({c.parent_id, id, Reason::UNTRUSTED_ROOT, "'" + id + "' lies on a parent cycle"});
      }
    }
  }
  return out;
}

}  // namespace govkit::verifier
