#pragma once

// Chain Verifiability Depth, its combination with Chain Auditability Depth,
// and the rule for marking degraded records.

#include <cstddef>
#include <span>
#include <vector>

#include "govkit/certificates.hpp"
#include "govkit/ledger.hpp"

namespace govkit::repro {

// chain[0] is the NA anchor v_0 and chain[1..n] the agents v_1..v_n. Returns
// the smallest j >= 1 where chain[j] is an agent with ρ = none, else n.
// Throws Error(not_trust_anchor) when chain[0] is missing or not NA.
std::size_t chain_verifiability_depth(std::span<const cert::Certificate> chain);

// min(CVD(chain), CAD(path)). `path` holds the n edges v_{j-1} -> v_j.
// Throws Error(length_mismatch) unless path.size() + 1 == chain.size().
std::size_t effective_verification_depth(std::span<const cert::Certificate> chain,
                                         const std::vector<ledger::Edge>& path,
                                         const std::vector<ledger::InteractionRecord>& records);

// Delegation edges v_{j-1} -> v_j for a root-to-leaf chain.
std::vector<ledger::Edge> chain_edges(std::span<const cert::Certificate> chain);

// True when a record produced at the end of `chain` (the edge into its last
// node, or a delivery out of it) must carry PARTIAL_VERIFIABILITY: the
// effective depth over that prefix is shorter than the prefix.
bool partial_verifiability(std::span<const cert::Certificate> chain,
                           const std::vector<ledger::InteractionRecord>& records);

}  // namespace govkit::repro
