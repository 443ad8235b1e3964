#include <doctest.h>

#include <random>

#include "govkit/depth.hpp"
#include "govkit/error.hpp"
#include "support.hpp"

using namespace govkit;
using namespace govkit::repro;

namespace {

cert::Certificate node(const std::string& id, cert::NodeType type, cert::ReproLevel level) {
  cert::Certificate c;
  c.id = id;
  c.node_type = type;
  c.repro.level = level;
  return c;
}

ledger::InteractionRecord rec(const std::string& s, const std::string& r) {
  ledger::InteractionRecord x;
  x.sender_id = s;
  x.receiver_id = r;
  return x;
}

}  // namespace

TEST_CASE("CVD stops at the first agent without a reproducibility commitment") {
  using cert::NodeType;
  using cert::ReproLevel;
  std::vector<cert::Certificate> chain = {node("root", NodeType::NA, ReproLevel::none),
                                          node("org", NodeType::NA, ReproLevel::none),
                                          node("a", NodeType::AG, ReproLevel::full),
                                          node("b", NodeType::AG, ReproLevel::statistical)};
  CHECK(chain_verifiability_depth(chain) == 3);
  chain[2].repro.level = ReproLevel::none;
  CHECK(chain_verifiability_depth(chain) == 2);
  chain[0].node_type = NodeType::AG;
  CHECK_THROWS_AS(chain_verifiability_depth(chain), Error);
  CHECK_THROWS_AS(chain_verifiability_depth(std::span<const cert::Certificate>{}), Error);
}

TEST_CASE("effective depth is the minimum of CVD and CAD") {
  using cert::NodeType;
  using cert::ReproLevel;
  const std::vector<cert::Certificate> chain = {node("r", NodeType::NA, ReproLevel::none),
                                                node("a", NodeType::AG, ReproLevel::full),
                                                node("b", NodeType::AG, ReproLevel::full),
                                                node("c", NodeType::AG, ReproLevel::full)};
  const auto path = chain_edges(chain);
  REQUIRE(path.size() == 3);
  CHECK(path[1] == ledger::Edge{"a", "b"});
  std::vector<ledger::InteractionRecord> all = {rec("r", "a"), rec("a", "b"), rec("b", "c")};
  CHECK(effective_verification_depth(chain, path, all) == 3);
  CHECK_FALSE(partial_verifiability(chain, all));
  std::vector<ledger::InteractionRecord> gap = {rec("r", "a"), rec("b", "c")};
  CHECK(effective_verification_depth(chain, path, gap) == 2);
  CHECK(partial_verifiability(chain, gap));
  CHECK_THROWS_AS(effective_verification_depth(chain, {path[0]}, all), Error);
}

TEST_CASE("property: brute force over random chains") {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<cert::Certificate> chain;
    chain.push_back(node("n0", cert::NodeType::NA, cert::ReproLevel::none));
    for (std::size_t j = 1; j <= n; ++j) {
      const auto type = rng() % 5 == 0 ? cert::NodeType::NA : cert::NodeType::AG;
      const auto level = static_cast<cert::ReproLevel>(rng() % 3);
      chain.push_back(node("n" + std::to_string(j), type, level));
    }
    std::vector<ledger::InteractionRecord> records;
    for (std::size_t j = 1; j <= n; ++j) {
      if (rng() % 4 != 0) records.push_back(rec(chain[j - 1].id, chain[j].id));
    }
    std::size_t cvd = n;
    for (std::size_t j = 1; j <= n; ++j) {
      if (chain[j].node_type == cert::NodeType::AG && chain[j].repro.level == cert::ReproLevel::none) {
        cvd = j;
        break;
      }
    }
    std::size_t cad = n;
    for (std::size_t j = 1; j <= n; ++j) {
      bool found = false;
      for (const auto& r : records) found |= r.sender_id == chain[j - 1].id && r.receiver_id == chain[j].id;
      if (!found) {
        cad = j;
        break;
      }
    }
    CHECK(chain_verifiability_depth(chain) == cvd);
    CHECK(effective_verification_depth(chain, chain_edges(chain), records) == std::min(cvd, cad));
    CHECK(partial_verifiability(chain, records) == (std::min(cvd, cad) < n));
  }
}
