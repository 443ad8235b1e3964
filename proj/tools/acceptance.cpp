// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when a
// criterion fails that is not listed in kKnownRed. Tolerances are fixed here,
// not taken from arguments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "govkit/budget.hpp"
#include "govkit/calibration.hpp"
#include "govkit/depth.hpp"
#include "govkit/executors.hpp"
#include "govkit/harness.hpp"
#include "govkit/ledger.hpp"
#include "govkit/metrics.hpp"
#include "govkit/replay.hpp"

using namespace govkit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

crypto::KeyPair key(std::string_view label) {
  return crypto::generate_keypair(crypto::digest(std::string("acceptance/") + std::string(label)).view());
}

Bytes digest_bytes(std::string_view s) {
  const auto d = crypto::digest(s);
  return Bytes(d.bytes.begin(), d.bytes.end());
}

ledger::AppendRequest request(const std::string& s, const std::string& r, std::uint64_t i) {
  ledger::AppendRequest q;
  q.timestamp = 1767225600000 + i;
  q.sender_id = s;
  q.receiver_id = r;
  q.sender_cert_hash = digest_bytes("cert/" + s);
  q.receiver_cert_hash = digest_bytes("cert/" + r);
  q.input_commitment = digest_bytes("in/" + std::to_string(i));
  q.output_commitment = digest_bytes("out/" + std::to_string(i));
  q.anchor = {i, "2025-01", crypto::digest("skills")};
  return q;
}

// Alternating a -> b and b -> a records.
struct TwoParty {
  crypto::KeyPair a = key("a");
  crypto::KeyPair b = key("b");
  ledger::KeyDirectory keys{{"a", a.public_key}, {"b", b.public_key}};

  ledger::Ledger build(std::size_t n) const {
    ledger::Ledger l;
    for (std::size_t i = 0; i < n; ++i) {
      const bool fwd = i % 2 == 0;
      l.append(request(fwd ? "a" : "b", fwd ? "b" : "a", i), fwd ? a.secret_key : b.secret_key,
               fwd ? b.secret_key : a.secret_key);
    }
    return l;
  }
};

// 1. Budget table.
Outcome budget_table() {
  const std::uint64_t ns[] = {10, 25, 50, 100, 200, 500};
  const double expected[] = {0.369, 0.168, 0.089, 0.045, 0.023, 0.009};
  constexpr double kTol = 0.001;
  double worst = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double d = std::abs(repro::epsilon_bound(ns[i], 0.01) - expected[i]);
    if (d > worst) worst = d, at = i;
  }
  return {worst <= kTol,
          fmt("worst entry n=%llu: computed %.5f vs table %.3f, |d| = %.5f (tol %.3f)",
              static_cast<unsigned long long>(ns[at]), repro::epsilon_bound(ns[at], 0.01), expected[at], worst, kTol)};
}

// 2. Structural scenarios and clean counterparts.
Outcome structural_suite() {
  harness::PipelineConfig cfg;
  std::size_t detected = 0, false_pos = 0;
  for (auto s : harness::kStructuralScenarios) {
    const auto r = harness::run_attack(cfg, s);
    detected += r.detected_as_expected();
    false_pos += r.false_positive_count;
  }
  std::size_t clean_ok = 0;
  for (std::size_t n : {5u, 10u, 20u}) {
    cfg.agent_count = n;
    const auto r = harness::run_clean_pipeline(cfg);
    clean_ok += r.denials == 0 && r.detections.empty() && r.audit.ok;
  }
  return {detected == 9 && false_pos == 0 && clean_ok == 3,
          fmt("%zu/9 detected as documented, %zu false positives, %zu/3 clean runs ALLOW/ok", detected, false_pos,
              clean_ok)};
}

// 3. End-to-end scenarios, baselines and clean runs.
Outcome end_to_end() {
  harness::PipelineConfig cfg;
  std::size_t detected = 0, g1 = 0, g2 = 0, g3 = 0, false_pos = 0;
  double e2e7_char_match = 1.0;
  for (auto s : harness::kEndToEndScenarios) {
    const auto r = harness::run_attack(cfg, s);
    false_pos += r.false_positive_count;
    if (!r.detected_as_expected()) continue;
    ++detected;
    const auto& spec = harness::scenario_spec(s);
    (spec.expected_layer == harness::Layer::G1 ? g1 : spec.expected_layer == harness::Layer::G2 ? g2 : g3)++;
    if (s == harness::Scenario::E2E7) {
      for (const auto& d : r.detections) {
        if (d.layer == harness::Layer::G2 && d.char_match) e2e7_char_match = std::min(e2e7_char_match, *d.char_match);
      }
    }
  }
  constexpr double kTheta = 0.85;  // analysis agent's statistical commitment
  const std::vector<harness::Scenario> e2e(std::begin(harness::kEndToEndScenarios),
                                           std::end(harness::kEndToEndScenarios));
  const auto matrix = harness::run_baseline_comparison(cfg, e2e);
  std::size_t baseline_hits = 0;
  for (auto mode : {harness::GovernanceMode::none, harness::GovernanceMode::auth_only,
                    harness::GovernanceMode::trace_only}) {
    for (const auto& [s, hit] : matrix.at(mode)) baseline_hits += hit;
  }
  std::size_t calls = 0, denials = 0, dirty = 0;
  for (std::uint64_t seed = 1; seed <= 90; ++seed) {
    harness::PipelineConfig c;
    c.seed = seed;
    const auto r = harness::run_clean_pipeline(c);
    calls += r.governed_calls;
    denials += r.denials;
    dirty += !r.audit.ok || !r.detections.empty();
  }
  const bool pass = detected == 7 && g1 == 5 && g2 == 1 && g3 == 1 && e2e7_char_match < kTheta && false_pos == 0 &&
                    baseline_hits == 0 && calls == 630 && denials == 0 && dirty == 0;
  return {pass, fmt("%zu/7 detected (G1 %zu, G2 %zu, G3 %zu; E2E7 char_match %.2f < %.2f), baselines %zu/21, "
                    "90 clean runs: %zu calls, %zu denials, %zu unclean audits",
                    detected, g1, g2, g3, e2e7_char_match, kTheta, baseline_hits, calls, denials, dirty)};
}

// 4. Tamper completeness over a 1000-record ledger. Each mutated audit starts
// from the checkpoint of the frame holding the change; the prefix before it is
// byte-identical to a clean audited prefix, so this equals a full audit.
Outcome tamper_completeness() {
  constexpr std::size_t kRecords = 1000;
  const TwoParty p;
  const auto ledger = p.build(kRecords);
  auto storage = ledger.serialize();
  const auto cps = ledger::checkpoints(storage);
  const auto frame_of = [&](std::size_t byte) {
    std::size_t k = 0;
    while (cps[k + 1].offset <= byte) ++k;
    return k;
  };

  std::size_t mutations = 0, caught = 0;
  std::size_t frame = 0;
  for (std::size_t b = 0; b < storage.size(); ++b) {
    while (cps[frame + 1].offset <= b) ++frame;
    const auto original = storage[b];
    storage[b] = static_cast<std::uint8_t>(original ^ (1 + (b * 131) % 255));
    ++mutations;
    caught += !ledger::audit_storage(storage, p.keys, cps[frame]).ok;
    storage[b] = original;
  }
  // Every replacement value for each byte of the first two frames.
  for (std::size_t b = 0; b < cps[2].offset; ++b) {
    const auto original = storage[b];
    for (int v = 0; v < 256; ++v) {
      if (v == original) continue;
      storage[b] = static_cast<std::uint8_t>(v);
      ++mutations;
      caught += !ledger::audit_storage(storage, p.keys, cps[frame_of(b)]).ok;
    }
    storage[b] = original;
  }

  // Deletions. An interior deletion breaks the audit; dropping the tail leaves
  // a valid shorter chain that only the retained head hash exposes.
  const auto head = ledger.head_hash();
  std::size_t deletions = 0, deletions_by_audit = 0, deletions_by_head = 0;
  for (std::size_t k = 0; k < kRecords; ++k) {
    Bytes shortened(storage.begin(), storage.begin() + static_cast<std::ptrdiff_t>(cps[k].offset));
    shortened.insert(shortened.end(), storage.begin() + static_cast<std::ptrdiff_t>(cps[k + 1].offset),
                     storage.end());
    ++deletions;
    const auto report = ledger::audit_storage(shortened, p.keys, cps[k]);
    if (!report.ok) {
      ++deletions_by_audit;
      continue;
    }
    const auto records = ledger::parse_storage(shortened);
    const auto tail = records.empty() ? crypto::Digest{} : ledger::record_hash(records.back());
    deletions_by_head += tail != head;
  }

  // Pairwise swaps. Frames after j + 1 are untouched and still link to frame
  // j + 1, so auditing through j + 1 decides the whole ledger.
  std::size_t swaps = 0, swaps_caught = 0;
  Bytes segment;
  segment.reserve(storage.size());
  const auto frame_bytes = [&](std::size_t k) {
    return std::make_pair(storage.begin() + static_cast<std::ptrdiff_t>(cps[k].offset),
                          storage.begin() + static_cast<std::ptrdiff_t>(cps[k + 1].offset));
  };
  for (std::size_t i = 0; i < kRecords; ++i) {
    for (std::size_t j = i + 1; j < kRecords; ++j) {
      segment.clear();
      for (std::size_t k = i; k <= std::min(j + 1, kRecords - 1); ++k) {
        const auto [from, to] = frame_bytes(k == i ? j : k == j ? i : k);
        segment.insert(segment.end(), from, to);
      }
      ledger::AuditCheckpoint start = cps[i];
      start.offset = 0;
      ++swaps;
      swaps_caught += !ledger::audit_storage(segment, p.keys, start).ok;
    }
  }

  const bool pass = caught == mutations && deletions_by_audit + deletions_by_head == deletions && swaps_caught == swaps;
  return {pass, fmt("byte mutations %zu/%zu, deletions %zu/%zu (%zu by audit, %zu by head hash), swaps %zu/%zu", caught,
                    mutations, deletions_by_audit + deletions_by_head, deletions, deletions_by_audit,
                    deletions_by_head, swaps_caught, swaps)};
}

// 5. Bounded divergence: an adversary diverging at rate p > eps(n, 0.01)
// survives all n statistical replays in at most 1% of repetitions.
Outcome bounded_divergence() {
  constexpr std::size_t kRepetitions = 10000;
  constexpr double kAlpha = 0.01;
  constexpr double kMargin = 1.05;  // p = 1.05 * eps
  cert::Certificate c;
  c.id = "analysis-1";
  c.model = {"mockai", "analyst-m", "2025-01"};
  c.repro.level = cert::ReproLevel::statistical;
  c.repro.config = {{"theta", "0.85"}, {"temperature", "0.7"}};
  auto base = std::make_shared<repro::DeterministicExecutor>(c.model, 24);

  bool pass = true;
  std::string detail;
  for (std::uint64_t n : {10u, 25u, 50u}) {
    const double eps = repro::epsilon_bound(n, kAlpha);
    const double p = kMargin * eps;
    std::size_t survived = 0;
    for (std::size_t rep = 0; rep < kRepetitions; ++rep) {
      auto runtime = std::make_shared<repro::ParaphraseNoiseExecutor>(base, 0.05, rep);
      repro::AdversarialExecutor adversary(runtime, p, n * 1'000'003 + rep);
      repro::ParaphraseNoiseExecutor replay(base, 0.05, ~rep);
      bool all_passed = true;
      for (std::uint64_t t = 0; t < n && all_passed; ++t) {
        const auto input = "rep " + std::to_string(rep) + " trial " + std::to_string(t);
        ledger::InteractionRecord r;
        r.seq = t + 1;
        r.input_commitment = crypto::digest(input);
        r.anchor.seed = t;
        const auto original = adversary.execute(as_bytes(input), t, c.repro.config);
        all_passed = repro::replay_verify(c, r, original, as_bytes(input), replay).verdict ==
                     repro::ReplayOutcome::VERIFIED;
      }
      survived += all_passed;
    }
    const double rate = static_cast<double>(survived) / kRepetitions;
    pass &= rate <= kAlpha;
    detail += fmt("%sn=%llu p=%.4f pass-all %.4f", detail.empty() ? "" : ", ", static_cast<unsigned long long>(n), p,
                  rate);
  }
  // Honest control: the same replay path never flags an honest agent.
  std::size_t honest_flags = 0;
  for (std::size_t rep = 0; rep < 1000; ++rep) {
    repro::ParaphraseNoiseExecutor runtime(base, 0.05, rep), replay(base, 0.05, ~rep);
    ledger::InteractionRecord r;
    const auto input = "honest " + std::to_string(rep);
    r.input_commitment = crypto::digest(input);
    const auto original = runtime.execute(as_bytes(input), 0, c.repro.config);
    honest_flags +=
        repro::replay_verify(c, r, original, as_bytes(input), replay).verdict != repro::ReplayOutcome::VERIFIED;
  }
  pass &= honest_flags == 0;
  return {pass, detail + fmt(" (limit %.2f); honest flagged %zu/1000", kAlpha, honest_flags)};
}

// 6. Metric properties over random pairs.
Outcome metric_properties() {
  constexpr std::size_t kPairs = 10000;
  constexpr double kSymTol = 1e-12;
  const std::vector<std::string> pieces = {"a", "b", "c", "the", "fox", "é", "€", "𝄞", " ", " ", "\t", "\n", "ab", "x"};
  std::mt19937_64 rng(6);
  auto random_text = [&](std::vector<int>& idx) {
    idx.resize(rng() % 24);
    std::string s;
    for (auto& i : idx) s += pieces[i = static_cast<int>(rng() % pieces.size())];
    return s;
  };
  std::size_t failures = 0, brute_mismatch = 0;
  std::vector<int> ia, ib;
  for (std::size_t k = 0; k < kPairs; ++k) {
    const auto a = random_text(ia);
    const auto b = random_text(ib);
    const auto ab = repro::score_all(a, b), ba = repro::score_all(b, a), aa = repro::score_all(a, a);
    for (auto m : repro::kAllMetrics) {
      const double x = ab.get(m);
      failures += !(x >= 0.0 && x <= 1.0) || std::abs(x - ba.get(m)) > kSymTol || aa.get(m) != 1.0;
    }
    const auto sa = repro::decode_scalars(a), sb = repro::decode_scalars(b);
    const auto longest = std::max(sa.size(), sb.size());
    std::size_t same = 0;
    for (std::size_t i = 0; i < std::min(sa.size(), sb.size()); ++i) same += sa[i] == sb[i];
    const double brute = longest == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(longest);
    brute_mismatch += repro::char_match(a, b) != brute;
  }
  return {failures == 0 && brute_mismatch == 0,
          fmt("%zu pairs x 4 metrics: %zu property violations, %zu char_match brute-force mismatches", kPairs, failures,
              brute_mismatch)};
}

// 7. Depth arithmetic and markers against prefix scans.
Outcome depth_math() {
  constexpr std::size_t kChains = 1000;
  std::mt19937 rng(7);
  std::size_t depth_mismatch = 0, marker_mismatch = 0, marked = 0, records_total = 0;
  for (std::size_t trial = 0; trial < kChains; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<cert::Certificate> chain(n + 1);
    std::vector<crypto::KeyPair> keys;
    ledger::KeyDirectory dir;
    for (std::size_t j = 0; j <= n; ++j) {
      chain[j].id = "t" + std::to_string(trial) + "-n" + std::to_string(j);
      chain[j].node_type = j == 0 || rng() % 6 == 0 ? cert::NodeType::NA : cert::NodeType::AG;
      chain[j].repro.level = static_cast<cert::ReproLevel>(rng() % 3);
      keys.push_back(key(chain[j].id));
      dir[chain[j].id] = keys.back().public_key;
    }
    // Records along the chain, some edges skipped; each record is marked from
    // the evidence present when it is written.
    ledger::Ledger l;
    std::vector<bool> expect_mark;
    for (std::size_t j = 1; j <= n; ++j) {
      if (rng() % 4 == 0) continue;
      auto req = request(chain[j - 1].id, chain[j].id, j);
      auto so_far = l.snapshot();
      ledger::InteractionRecord pending;
      pending.sender_id = req.sender_id;
      pending.receiver_id = req.receiver_id;
      so_far.push_back(pending);
      const std::span<const cert::Certificate> prefix(chain.data(), j + 1);
      if (repro::partial_verifiability(prefix, so_far)) req.markers.insert(ledger::Marker::PARTIAL_VERIFIABILITY);
      l.append(req, keys[j - 1].secret_key, keys[j].secret_key);

      // Brute force over the same prefix.
      std::size_t cvd = j, cad = j;
      for (std::size_t i = 1; i <= j; ++i) {
        if (chain[i].node_type == cert::NodeType::AG && chain[i].repro.level == cert::ReproLevel::none) {
          cvd = i;
          break;
        }
      }
      for (std::size_t i = 1; i <= j; ++i) {
        bool found = false;
        for (const auto& r : so_far) found |= r.sender_id == chain[i - 1].id && r.receiver_id == chain[i].id;
        if (!found) {
          cad = i;
          break;
        }
      }
      expect_mark.push_back(std::min(cvd, cad) < j);
    }
    const auto records = l.snapshot();
    records_total += records.size();
    for (std::size_t k = 0; k < records.size(); ++k) {
      const bool has = records[k].markers.contains(ledger::Marker::PARTIAL_VERIFIABILITY);
      marked += has;
      marker_mismatch += has != expect_mark[k];
    }
    if (!ledger::audit(records, dir).ok) ++marker_mismatch;

    // Whole-chain depths.
    std::size_t cvd = n, cad = n;
    for (std::size_t j = 1; j <= n; ++j) {
      if (chain[j].node_type == cert::NodeType::AG && chain[j].repro.level == cert::ReproLevel::none) {
        cvd = j;
        break;
      }
    }
    for (std::size_t j = 1; j <= n; ++j) {
      bool found = false;
      for (const auto& r : records) found |= r.sender_id == chain[j - 1].id && r.receiver_id == chain[j].id;
      if (!found) {
        cad = j;
        break;
      }
    }
    const auto path = repro::chain_edges(chain);
    depth_mismatch += repro::chain_verifiability_depth(chain) != cvd;
    depth_mismatch += ledger::chain_auditability_depth(path, records) != cad;
    depth_mismatch += repro::effective_verification_depth(chain, path, records) != std::min(cvd, cad);
  }
  return {depth_mismatch == 0 && marker_mismatch == 0,
          fmt("%zu chains: %zu depth mismatches; %zu records, %zu marked, %zu marker mismatches", kChains,
              depth_mismatch, records_total, marked, marker_mismatch)};
}

// 8. Ratio-based performance sanity.
Outcome performance() {
  constexpr double kManifestLimitMs = 1.0;
  constexpr double kAuditLo = 8.0, kAuditHi = 12.0;
  constexpr double kAgentSpread = 2.0;

  cert::SkillsManifest m;
  for (int i = 0; i < 100; ++i) {
    const auto name = "tool_" + std::to_string(i);
    m.entries.push_back({name, "1.0", cert::descriptor_hash(name, "1.0", "(x: string) -> string"), {"net:read", "fs:read"}});
  }
  std::vector<double> manifest_ms;
  for (int r = 0; r < 200; ++r) {
    const auto t0 = Clock::now();
    volatile auto h = cert::manifest_hash(m).bytes[0];
    (void)h;
    manifest_ms.push_back(seconds_since(t0) * 1e3);
  }
  std::sort(manifest_ms.begin(), manifest_ms.end());
  const double manifest_median = manifest_ms[manifest_ms.size() / 2];

  const TwoParty p;
  const auto big = p.build(100000).serialize();
  const auto cps = ledger::checkpoints(big);
  const Bytes small(big.begin(), big.begin() + static_cast<std::ptrdiff_t>(cps[10000].offset));
  auto best = [&](const Bytes& storage, int runs) {
    double t = 1e300;
    for (int r = 0; r < runs; ++r) {
      const auto t0 = Clock::now();
      const auto report = ledger::audit_storage(storage, p.keys);
      t = std::min(t, seconds_since(t0));
      if (!report.ok) return -1.0;
    }
    return t;
  };
  const double t_small = best(small, 5);
  const double t_big = best(big, 2);
  const double audit_ratio = t_big / t_small;

  const auto scratch = std::filesystem::temp_directory_path() / "govkit-acceptance-overhead";
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);
  const auto rows = harness::measure_overhead({5, 10, 20}, 20, true, scratch);
  std::filesystem::remove_all(scratch);
  double lo = 1e300, hi = 0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.per_agent_ms);
    hi = std::max(hi, r.per_agent_ms);
  }
  const double spread = hi / lo;

  const bool pass = manifest_median < kManifestLimitMs && t_small > 0 && t_big > 0 && audit_ratio >= kAuditLo &&
                    audit_ratio <= kAuditHi && spread < kAgentSpread;
  return {pass, fmt("manifest(100) %.3f ms < %.1f; audit 100k/10k = %.2f in [%.0f, %.0f]; per-agent max/min over "
                    "5..20 agents = %.2f < %.1f",
                    manifest_median, kManifestLimitMs, audit_ratio, kAuditLo, kAuditHi, spread, kAgentSpread)};
}

// 9. Calibration on synthetic clusters.
Outcome calibration() {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> same(0.80, 0.98), cross(0.05, 0.35);
  std::vector<repro::LabeledScores> pairs;
  double cross_max = 0, same_min = 1;
  for (int i = 0; i < 200; ++i) {
    repro::ScoreVector s, c;
    s.char_match = s.jaccard = s.tfidf_cosine = s.ngram_cosine = same(rng);
    c.char_match = c.jaccard = c.tfidf_cosine = c.ngram_cosine = cross(rng);
    same_min = std::min(same_min, s.char_match);
    cross_max = std::max(cross_max, c.char_match);
    pairs.push_back({s, true});
    pairs.push_back({c, false});
  }
  const auto two = repro::calibrate_thresholds(pairs);
  bool two_ok = true, fields_ok = true;
  for (const auto& m : two.metrics) {
    two_ok &= m.youden_j == 1.0 && m.theta > cross_max && m.theta < same_min;
    fields_ok &= m.cohens_d.has_value() && m.separation_ratio.has_value() && m.cross_model_pass_rate == m.fpr;
  }

  // One cluster: every score appears once under each label.
  std::vector<double> scores;
  std::unique_ptr<bool[]> labels(new bool[400]);
  for (int i = 0; i < 200; ++i) {
    const double v = same(rng);
    scores.push_back(v);
    scores.push_back(v);
    labels[2 * i] = true;
    labels[2 * i + 1] = false;
  }
  const auto one = repro::calibrate_metric(repro::Metric::char_match, scores, {labels.get(), 400});

  return {two_ok && fields_ok && one.youden_j == 0.0 && two.metrics.size() == 4,
          fmt("two clusters: J = %.3f, theta %.3f in (%.3f, %.3f), d = %.1f, sep = %.2f, q = %.3f; one cluster: J = %.3f",
              two.at(repro::Metric::char_match).youden_j, two.at(repro::Metric::char_match).theta, cross_max, same_min,
              two.at(repro::Metric::char_match).cohens_d.value_or(0),
              two.at(repro::Metric::char_match).separation_ratio.value_or(0),
              two.at(repro::Metric::char_match).cross_model_pass_rate, one.youden_j)};
}

}  // namespace

// Criteria that cannot pass as stated. They still print FAIL; only failures
// outside this list make the run exit non-zero.
struct KnownRed {
  std::size_t criterion;
  const char* reason;
};
constexpr KnownRed kKnownRed[] = {
    {1, "the table's n=50 entry 0.089 is not 1 - 0.01^(1/50) = 0.08799; the other five entries agree within 0.0003"},
};

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"budget table", budget_table},
      {"structural attack suite", structural_suite},
      {"end-to-end simulation", end_to_end},
      {"ledger tamper completeness", tamper_completeness},
      {"bounded-divergence monte carlo", bounded_divergence},
      {"metric properties", metric_properties},
      {"depth math", depth_math},
      {"performance ratios", performance},
      {"calibration", calibration},
  };
  int failed = 0, known = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const KnownRed* red = nullptr;
    for (const auto& k : kKnownRed) {
      if (k.criterion == i + 1) red = &k;
    }
    if (!o.pass) (red ? known : failed)++;
    std::printf("[%s] %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    if (!o.pass && red) std::printf("       known red: %s\n", red->reason);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass; %d known red, %d unexpected failures\n",
              criteria.size() - static_cast<std::size_t>(failed + known), criteria.size(), known, failed);
  return failed == 0 ? 0 : 1;
}
