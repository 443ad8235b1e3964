#include "govkit/depth.hpp"

#include <algorithm>

#include "govkit/error.hpp"

namespace govkit::repro {

std::size_t chain_verifiability_depth(std::span<const cert::Certificate> chain) {
  if (chain.empty() || chain.front().node_type != cert::NodeType::NA) {
    throw Error(ErrorCode::not_trust_anchor, "chain must start at a non-agent trust anchor");
  }
  const auto n = chain.size() - 1;
  for (std::size_t j = 1; j <= n; ++j) {
    if (chain[j].node_type == cert::NodeType::AG && chain[j].repro.level == cert::ReproLevel::none) return j;
  }
  return n;
}

std::size_t effective_verification_depth(std::span<const cert::Certificate> chain,
                                         const std::vector<ledger::Edge>& path,
                                         const std::vector<ledger::InteractionRecord>& records) {
  if (path.size() + 1 != chain.size()) {
    throw Error(ErrorCode::length_mismatch, "path has " + std::to_string(path.size()) + " edges for a chain of " +
                                                std::to_string(chain.size()) + " nodes");
  }
  return std::min(chain_verifiability_depth(chain), ledger::chain_auditability_depth(path, records));
}

std::vector<ledger::Edge> chain_edges(std::span<const cert::Certificate> chain) {
  std::vector<ledger::Edge> out;
  for (std::size_t j = 1; j < chain.size(); ++j) out.emplace_back(chain[j - 1].id, chain[j].id);
  return out;
}

bool partial_verifiability(std::span<const cert::Certificate> chain,
                           const std::vector<ledger::InteractionRecord>& records) {
  const auto n = chain.size() - 1;
  return effective_verification_depth(chain, chain_edges(chain), records) < n;
}

}  // namespace govkit::repro
