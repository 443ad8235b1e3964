#include <doctest.h>

#include <random>
#include <thread>

#include "govkit/error.hpp"
#include "govkit/harness.hpp"
#include "govkit/verifier.hpp"
#include "support.hpp"

using namespace govkit;
using namespace testsupport;
using cert::Tier;
using verifier::Reason;

namespace {

struct Fixture {
  Pki pki;
  verifier::TrustAnchors anchors = verifier::anchors_from(std::vector<cert::Certificate>{pki.root});
  verifier::RevocationRegistry revocations;
  cert::SkillsManifest runtime = manifest({"search"});
  verifier::Credential credential{"cred", Tier::T2, "vault://cred"};

  verifier::AccessDecision check(std::vector<cert::Certificate> chain, verifier::VerifyOptions options = {}) const {
    return verifier::verify_access(chain, credential, runtime, anchors, revocations, kNow, options);
  }
};

cert::Certificate resign(cert::Certificate c, const crypto::KeyPair& k) { return cert::sign_unchecked(std::move(c), k.secret_key); }

}  // namespace

TEST_CASE("a well-formed chain is allowed") {
  Fixture f;
  const auto d = f.check(f.pki.chain());
  CHECK(d.allowed());
  CHECK(d.reason == Reason::OK);
  CHECK_FALSE(d.phase.has_value());
  CHECK(f.check(f.pki.chain(), {model("m-a"), nullptr}).allowed());
}

TEST_CASE("phase 1: anchoring") {
  Fixture f;
  SUBCASE("unknown anchor") {
    f.anchors.clear();
    CHECK(f.check(f.pki.chain()).reason == Reason::UNTRUSTED_ROOT);
  }
  SUBCASE("same id, different key") {
    const auto fake_key = key("fake-root");
    auto s = anchor_subject("root", fake_key);
    auto fake_root = cert::issue_root(s, fake_key.secret_key);
    auto chain = f.pki.chain();
    chain[0] = fake_root;
    chain[1] = resign(chain[1], fake_key);
    const auto d = f.check(chain);
    CHECK(d.reason == Reason::UNTRUSTED_ROOT);
    CHECK(d.phase == 1);
  }
  SUBCASE("chain must start at a self-issued anchor") {
    auto chain = f.pki.chain();
    chain.erase(chain.begin());
    f.anchors["org"] = f.pki.org.public_key;
    CHECK(f.check(chain).reason == Reason::UNTRUSTED_ROOT);
  }
  SUBCASE("empty chain") { CHECK(f.check({}).reason == Reason::UNTRUSTED_ROOT); }
  SUBCASE("root self-signature") {
    auto chain = f.pki.chain();
    chain[0].not_after += 1;
    CHECK(f.check(chain).reason == Reason::BAD_SIGNATURE);
  }
}

TEST_CASE("phase 1: edges") {
  Fixture f;
  auto chain = f.pki.chain();
  SUBCASE("tampered leaf") {
    chain[3].constraints.max_tier = Tier::T1;
    CHECK(f.check(chain).reason == Reason::BAD_SIGNATURE);
  }
  SUBCASE("broken parent linkage") {
    chain[3].parent_id = "org";
    chain[3] = resign(chain[3], f.pki.agent_key);
    CHECK(f.check(chain).reason == Reason::BAD_SIGNATURE);
  }
  SUBCASE("signed by a non-parent key") {
    chain[3] = resign(chain[3], key("attacker"));
    CHECK(f.check(chain).reason == Reason::BAD_SIGNATURE);
  }
  SUBCASE("agent issued an anchor") {
    auto s = anchor_subject("na", key("na"), 0);
    chain.push_back(resign(body_of(s, "leaf"), f.pki.leaf_key));
    CHECK(f.check(chain).reason == Reason::TYPE_CONSTRAINT);
  }
  SUBCASE("issuer depth exhausted") {
    const auto k = key("c1");
    auto c1 = resign(body_of(agent_subject("c1", k, Tier::T3, 0), "leaf"), f.pki.leaf_key);
    auto c2 = resign(body_of(agent_subject("c2", key("c2"), Tier::T3, 0), "c1"), k);
    chain.push_back(c1);
    f.credential.tier = Tier::T3;
    CHECK(f.check(chain).allowed());
    chain.push_back(c2);
    const auto d = f.check(chain);
    CHECK(d.reason == Reason::DEPTH_EXHAUSTED);
    CHECK(d.phase == 1);
  }
  SUBCASE("non-monotone constraints") {
    chain.push_back(resign(body_of(agent_subject("c", key("c"), Tier::T1, 0), "leaf"), f.pki.leaf_key));
    CHECK(f.check(chain).reason == Reason::CONSTRAINT_VIOLATION);
  }
  SUBCASE("agent model outside its own allowed set") {
    auto s = agent_subject("c", key("c"), Tier::T3, 0);
    s.model = model("m-z");
    chain.push_back(resign(body_of(s, "leaf"), f.pki.leaf_key));
    CHECK(f.check(chain).reason == Reason::CONSTRAINT_VIOLATION);
  }
  SUBCASE("expired member") {
    auto s = agent_subject("c", key("c"), Tier::T3, 0);
    s.not_before = kNow - 10 * kDay;
    s.not_after = kNow - kDay;
    chain.push_back(resign(body_of(s, "leaf"), f.pki.leaf_key));
    CHECK(f.check(chain).reason == Reason::EXPIRED);
  }
  SUBCASE("not yet valid member") {
    auto s = agent_subject("c", key("c"), Tier::T3, 0);
    s.not_before = kNow + 1;
    chain.push_back(resign(body_of(s, "leaf"), f.pki.leaf_key));
    CHECK(f.check(chain).reason == Reason::EXPIRED);
  }
}

TEST_CASE("phase 2: capability binding") {
  Fixture f;
  SUBCASE("extra runtime tool") {
    f.runtime = manifest({"search", "shell"});
    const auto d = f.check(f.pki.chain());
    CHECK(d.reason == Reason::MANIFEST_MISMATCH);
    CHECK(d.phase == 2);
  }
  SUBCASE("changed tool hash") {
    f.runtime.entries[0].h.bytes[0] ^= 1;
    CHECK(f.check(f.pki.chain()).reason == Reason::MANIFEST_MISMATCH);
  }
  SUBCASE("runtime model differs") {
    const auto d = f.check(f.pki.chain(), {model("m-b"), nullptr});
    CHECK(d.reason == Reason::MODEL_MISMATCH);
    CHECK(d.phase == 2);
  }
  SUBCASE("manifest outranks tier") {
    f.runtime = manifest({"other"});
    f.credential.tier = Tier::T0;
    CHECK(f.check(f.pki.chain()).reason == Reason::MANIFEST_MISMATCH);
  }
}

TEST_CASE("phase 3: credential tier against the effective tier") {
  Fixture f;
  f.credential.tier = Tier::T1;
  auto d = f.check(f.pki.chain());
  CHECK(d.reason == Reason::TIER_EXCEEDED);
  CHECK(d.phase == 3);
  f.credential.tier = Tier::T3;
  CHECK(f.check(f.pki.chain()).allowed());

  // An unreproducible agent is treated one tier less privileged.
  auto s = agent_subject("opaque", key("opaque"), Tier::T2, 0, "m-a", cert::ReproLevel::none);
  auto chain = f.pki.chain();
  chain.push_back(resign(body_of(s, "leaf"), f.pki.leaf_key));
  CHECK(verifier::effective_tier(chain.back()) == Tier::T3);
  f.credential.tier = Tier::T2;
  CHECK(f.check(chain).reason == Reason::TIER_EXCEEDED);
  f.credential.tier = Tier::T3;
  CHECK(f.check(chain).allowed());
  s.constraints.max_tier = Tier::T3;
  CHECK(verifier::effective_tier(body_of(s, "leaf")) == Tier::T3);  // saturates
}

TEST_CASE("phase 4: revocation of any chain member") {
  Fixture f;
  f.revocations.revoke("agent", kNow + 1);
  CHECK(f.check(f.pki.chain()).allowed());  // not yet in force
  f.revocations.revoke("agent", kNow);
  const auto d = f.check(f.pki.chain());
  CHECK(d.reason == Reason::REVOKED);
  CHECK(d.phase == 4);
  CHECK(f.revocations.revoked_at("agent") == kNow);
  f.revocations.revoke("agent", kNow + 5);  // the earliest time is kept
  CHECK(f.revocations.revoked_at("agent") == kNow);
  CHECK(f.revocations.size() == 1);
}

TEST_CASE("revocation registry is safe under concurrent use") {
  verifier::RevocationRegistry r;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&r, t] {
      for (int i = 0; i < 500; ++i) {
        r.revoke("c" + std::to_string(i % 50), static_cast<cert::Timestamp>(1000 - t * 10 - i % 7));
        (void)r.is_revoked("c" + std::to_string(i % 50), 2000);
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(r.size() == 50);
  for (const auto& [id, at] : r.entries()) CHECK(at <= 1000 - 30);
}

TEST_CASE("property: single-byte mutations of any chain member never allow unless the bytes are unchanged") {
  Fixture f;
  const auto chain = f.pki.chain();
  std::mt19937 rng(23);
  int decoded = 0;
  for (int iter = 0; iter < 1500; ++iter) {
    auto mutated = chain;
    const auto which = rng() % chain.size();
    auto bytes = cert::encode_certificate(chain[which]);
    const auto pos = rng() % bytes.size();
    bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      mutated[which] = cert::decode_certificate(bytes);
    } catch (const Error&) {
      continue;
    }
    ++decoded;
    CHECK_FALSE(f.check(mutated).allowed());
  }
  CHECK(decoded > 100);
}

TEST_CASE("signature cache does not change decisions") {
  Fixture f;
  crypto::SignatureCache cache;
  auto bad = f.pki.chain();
  bad[2].constraints.max_rate = cert::Rate::make(9, 1);
  for (int round = 0; round < 3; ++round) {
    CHECK(f.check(f.pki.chain(), {std::nullopt, &cache}).allowed());
    CHECK(f.check(bad, {std::nullopt, &cache}).reason == Reason::BAD_SIGNATURE);
  }
  CHECK(cache.size() == 4);
}

TEST_CASE("combined access never merges permissions") {
  Fixture f;
  auto t3 = [&](const std::string& id) {
    auto chain = f.pki.chain();
    chain.push_back(resign(body_of(agent_subject(id, key(id), Tier::T3, 0), "leaf"), f.pki.leaf_key));
    return verifier::AgentContext{chain, f.runtime, std::nullopt};
  };
  const std::vector<verifier::AgentContext> pair = {t3("a"), t3("b")};
  const verifier::Credential t1{"prod", Tier::T1, {}};
  auto d = verifier::combined_access(pair, t1, f.anchors, f.revocations, kNow);
  CHECK(d.reason == Reason::TIER_EXCEEDED);
  CHECK(d.phase == 3);

  const verifier::Credential t3cred{"low", Tier::T3, {}};
  CHECK(verifier::combined_access(pair, t3cred, f.anchors, f.revocations, kNow).allowed());

  CHECK(verifier::combined_access({}, t1, f.anchors, f.revocations, kNow).reason == Reason::UNTRUSTED_ROOT);

  // The reported denial is the one that got furthest.
  auto broken = t3("c");
  broken.chain[0].not_after += 1;  // phase 1
  std::vector<verifier::AgentContext> mixed = {broken, t3("d")};
  CHECK(verifier::combined_access(mixed, t1, f.anchors, f.revocations, kNow).reason == Reason::TIER_EXCEEDED);
}

TEST_CASE("property: combined access allows iff some member is allowed alone") {
  Fixture f;
  std::mt19937 rng(31);
  const std::vector<Tier> tiers = {Tier::T0, Tier::T1, Tier::T2, Tier::T3};
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<verifier::AgentContext> agents;
    const auto n = 1 + rng() % 3;
    for (std::size_t i = 0; i < n; ++i) {
      auto chain = f.pki.chain();
      const auto id = "x" + std::to_string(i);
      chain.push_back(resign(body_of(agent_subject(id, key(id), tiers[2 + rng() % 2], 0), "leaf"), f.pki.leaf_key));
      auto runtime = rng() % 4 == 0 ? manifest({"other"}) : f.runtime;
      agents.push_back({chain, runtime, std::nullopt});
    }
    const verifier::Credential c{"c", tiers[rng() % 4], {}};
    bool any = false;
    for (const auto& a : agents) {
      any = any || verifier::verify_access(a.chain, c, a.runtime_manifest, f.anchors, f.revocations, kNow).allowed();
    }
    CHECK(verifier::combined_access(agents, c, f.anchors, f.revocations, kNow).allowed() == any);
  }
}

TEST_CASE("tree validation") {
  Pki pki;
  verifier::TrustTree tree;
  tree.root_ids = {"root"};
  for (const auto& c : pki.chain()) tree.add(c);
  CHECK(verifier::validate_tree(tree).empty());
  CHECK(tree.chain_to("leaf").size() == 4);
  CHECK(tree.children("agent") == std::vector<std::string>{"leaf"});
  CHECK(tree.edges().size() == 3);
  CHECK_THROWS_AS(tree.add(pki.leaf), Error);

  auto bad = tree;
  bad.nodes["bad"] = resign(body_of(agent_subject("bad", key("bad"), Tier::T1, 0), "leaf"), pki.leaf_key);
  auto v = verifier::validate_tree(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == Reason::CONSTRAINT_VIOLATION);
  CHECK(v[0].child_id == "bad");

  auto orphan = tree;
  orphan.nodes["o"] = resign(body_of(agent_subject("o", key("o"), Tier::T3, 0), "missing"), pki.leaf_key);
  CHECK(verifier::validate_tree(orphan).at(0).rule == Reason::UNTRUSTED_ROOT);

  auto untrusted = tree;
  untrusted.root_ids.clear();
  CHECK(verifier::validate_tree(untrusted).at(0).rule == Reason::UNTRUSTED_ROOT);

  auto cyclic = tree;
  cyclic.nodes["p"] = resign(body_of(agent_subject("p", key("p"), Tier::T3, 0), "q"), key("q"));
  cyclic.nodes["q"] = resign(body_of(agent_subject("q", key("q"), Tier::T3, 0), "p"), key("p"));
  bool cycle_found = false;
  for (const auto& x : verifier::validate_tree(cyclic)) cycle_found = cycle_found || x.detail.find("cycle") != std::string::npos;
  CHECK(cycle_found);
}

TEST_CASE("simulation topologies are valid trees") {
  for (std::size_t n : {5, 10, 20}) {
    harness::PipelineConfig config;
    config.agent_count = n;
    verifier::TrustTree tree;
    tree.root_ids = {"root-ca"};
    for (const auto& c : harness::topology_certificates(config)) tree.add(c);
    CHECK(tree.nodes.size() == n + 2);
    CHECK(verifier::validate_tree(tree).empty());
  }
}
