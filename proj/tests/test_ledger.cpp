#include <doctest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <json.hpp>

#include "govkit/error.hpp"
#include "support.hpp"

using namespace govkit;
using namespace testsupport;
using ledger::AuditFailure;

namespace {

struct Parties {
  crypto::KeyPair a = key("party-a");
  crypto::KeyPair b = key("party-b");
  ledger::KeyDirectory dir{{"a", a.public_key}, {"b", b.public_key}};

  void fill(ledger::Ledger& l, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) {
      const bool fwd = i % 2 == 0;
      l.append(request(fwd ? "a" : "b", fwd ? "b" : "a", i), fwd ? a.secret_key : b.secret_key,
               fwd ? b.secret_key : a.secret_key);
    }
  }
};

Bytes reframe(const std::vector<ledger::InteractionRecord>& records) {
  Bytes out;
  for (const auto& r : records) ledger::append_frame(out, ledger::encode_record(r));
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("govkit-test-" + std::to_string(::getpid()) + "-" + name);
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("record encoding, signatures and storage match cbor2 + cryptography") {
  const auto& o = oracles()["ledger"];
  const auto s = crypto::generate_keypair(from_hex(o["sender_seed"].get<std::string>()));
  const auto r = crypto::generate_keypair(from_hex(o["receiver_seed"].get<std::string>()));
  ledger::Ledger l;
  for (std::uint64_t seq = 1; seq <= 2; ++seq) {
    ledger::AppendRequest req;
    req.timestamp = 1767225600000 + seq;
    req.sender_id = "coordinator";
    req.receiver_id = "research-1";
    req.sender_cert_hash = digest_bytes("cert/coordinator");
    req.receiver_cert_hash = digest_bytes("cert/research-1");
    req.input_commitment = digest_bytes("input " + std::to_string(seq));
    req.output_commitment = digest_bytes("output " + std::to_string(seq));
    req.anchor = {42 + seq, "2025-01", crypto::digest("skills")};
    if (seq == 2) req.markers = {ledger::Marker::PARTIAL_VERIFIABILITY};
    const auto rec = l.append(req, s.secret_key, r.secret_key);
    const auto& expect = o["records"][seq - 1];
    CHECK(rec.seq == seq);
    CHECK(to_hex(ledger::encode_body(rec)) == expect["body_hex"].get<std::string>());
    CHECK(rec.sender_sig.hex() == expect["sender_sig"].get<std::string>());
    CHECK(rec.receiver_sig.hex() == expect["receiver_sig"].get<std::string>());
    CHECK(to_hex(ledger::encode_record(rec)) == expect["encoded_hex"].get<std::string>());
    CHECK(ledger::record_hash(rec).hex() == expect["record_hash"].get<std::string>());
  }
  CHECK(to_hex(l.serialize()) == o["storage_hex"].get<std::string>());
  CHECK(l.head_hash().hex() == o["records"][1]["record_hash"].get<std::string>());
}

TEST_CASE("append links records and rejects bad digests atomically") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 3);
  const auto records = l.snapshot();
  CHECK(records[0].prev_hash == crypto::Digest{});
  CHECK(records[1].prev_hash == ledger::record_hash(records[0]));
  CHECK(records[2].seq == 3);
  auto bad = request("a", "b", 9);
  bad.input_commitment.pop_back();
  CHECK_THROWS_AS(l.append(bad, p.a.secret_key, p.b.secret_key), Error);
  CHECK(l.size() == 3);
  CHECK(ledger::audit(l, p.dir).ok);
}

TEST_CASE("audit detects each failure class at the offending position") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 6);
  const auto clean = l.snapshot();
  const auto ok = ledger::audit(clean, p.dir);
  CHECK(ok.ok);
  CHECK(ok.records_checked == 6);

  SUBCASE("sender signature") {
    auto r = clean;
    r[2].output_commitment.bytes[0] ^= 1;
    const auto rep = ledger::audit(r, p.dir);
    CHECK(rep.failure == AuditFailure::SIG_SENDER);
    CHECK(rep.first_bad_seq == 3);
    CHECK(rep.records_checked == 2);
  }
  SUBCASE("receiver signature after a unilateral re-sign") {
    auto r = clean;
    r[2].output_commitment.bytes[0] ^= 1;
    r[2].sender_sig = crypto::sign(p.a.secret_key, ledger::signing_message(r[2]));
    const auto rep = ledger::audit(r, p.dir);
    CHECK(rep.failure == AuditFailure::SIG_RECEIVER);
    CHECK(rep.first_bad_seq == 3);
  }
  SUBCASE("hash chain after a bilateral re-sign") {
    auto r = clean;
    r[2].output_commitment.bytes[0] ^= 1;
    const auto msg = ledger::signing_message(r[2]);
    r[2].sender_sig = crypto::sign(p.a.secret_key, msg);
    r[2].receiver_sig = crypto::sign(p.b.secret_key, msg);
    const auto rep = ledger::audit(r, p.dir);
    CHECK(rep.failure == AuditFailure::CHAIN_BREAK);
    CHECK(rep.first_bad_seq == 4);
  }
  SUBCASE("deletion") {
    auto r = clean;
    r.erase(r.begin() + 3);
    const auto rep = ledger::audit(r, p.dir);
    CHECK(rep.failure == AuditFailure::SEQ_GAP);
    CHECK(rep.first_bad_seq == 4);
  }
  SUBCASE("swap") {
    auto r = clean;
    std::swap(r[1], r[4]);
    CHECK(ledger::audit(r, p.dir).first_bad_seq == 2);
  }
  SUBCASE("unknown signer") {
    auto dir = p.dir;
    dir.erase("b");
    const auto rep = ledger::audit(clean, dir);
    CHECK(rep.failure == AuditFailure::SIG_RECEIVER);
    CHECK(rep.first_bad_seq == 1);
  }
  SUBCASE("truncation of the tail is invisible but of the head is not") {
    auto r = clean;
    r.pop_back();
    CHECK(ledger::audit(r, p.dir).ok);
    r = clean;
    r.erase(r.begin());
    CHECK(ledger::audit(r, p.dir).failure == AuditFailure::SEQ_GAP);
  }
}

TEST_CASE("storage framing") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 4);
  const auto storage = l.serialize();
  CHECK(ledger::parse_storage(storage) == l.snapshot());
  CHECK(ledger::audit_storage(storage, p.dir).ok);
  CHECK(ledger::split_frames(Bytes{}).empty());
  for (std::size_t cut : {std::size_t{1}, std::size_t{3}, std::size_t{10}, storage.size() - 1}) {
    const auto rep = ledger::audit_storage(ByteView(storage.data(), cut), p.dir);
    CHECK(rep.failure == AuditFailure::MALFORMED);
  }
  Bytes huge = {0xff, 0xff, 0xff, 0x7f};
  CHECK_THROWS_AS(ledger::split_frames(huge), Error);
  auto garbage = storage;
  garbage.insert(garbage.end(), {2, 0, 0, 0, 0xff, 0xff});
  const auto rep = ledger::audit_storage(garbage, p.dir);
  CHECK(rep.failure == AuditFailure::MALFORMED);
  CHECK(rep.first_bad_seq == 5);
}

TEST_CASE("checkpointed audit equals a full audit") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 12);
  const auto storage = l.serialize();
  const auto cps = ledger::checkpoints(storage);
  REQUIRE(cps.size() == 13);
  CHECK(cps.front().offset == 0);
  CHECK(cps.back().offset == storage.size());
  std::mt19937 rng(2);
  for (int iter = 0; iter < 400; ++iter) {
    auto m = storage;
    const auto pos = rng() % m.size();
    m[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    std::size_t k = 0;
    while (k + 1 < cps.size() && cps[k + 1].offset <= pos) ++k;
    const auto full = ledger::audit_storage(m, p.dir);
    const auto inc = ledger::audit_storage(m, p.dir, cps[k]);
    CHECK_FALSE(full.ok);
    CHECK(inc.ok == full.ok);
    CHECK(inc.failure == full.failure);
    CHECK(inc.first_bad_seq == full.first_bad_seq);
  }
}

TEST_CASE("file-backed ledger persists and reloads") {
  Parties p;
  const auto path = temp_path("persist.ledger");
  {
    auto l = ledger::Ledger::open(path, true);
    p.fill(l, 5);
  }
  {
    auto l = ledger::Ledger::open(path, false);
    CHECK(l.size() == 5);
    p.fill(l, 1);  // continues the chain
    CHECK(ledger::audit(l, p.dir).ok);
  }
  CHECK(std::filesystem::file_size(path) == ledger::Ledger::open(path).serialize().size());
  {
    std::FILE* f = std::fopen(path.c_str(), "ab");
    std::fputc(1, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(ledger::Ledger::open(path), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ledger::Ledger::open("/nonexistent-dir/x.ledger"), Error);
}

TEST_CASE("concurrent appends keep a single valid chain") {
  Parties p;
  ledger::Ledger l;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        l.append(request("a", "b", static_cast<std::uint64_t>(t * 100 + i)), p.a.secret_key, p.b.secret_key);
        (void)l.snapshot();
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(l.size() == 100);
  CHECK(ledger::audit(l, p.dir).ok);
}

TEST_CASE("decode rejects unknown markers and trailing bytes") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 1);
  auto r = l.snapshot()[0];
  auto enc = ledger::encode_record(r);
  enc.push_back(0);
  CHECK_THROWS_AS(ledger::decode_record(enc), Error);
  r.markers.insert(static_cast<ledger::Marker>(5));
  CHECK_THROWS_AS(ledger::decode_record(ledger::encode_record(r)), Error);
}

TEST_CASE("export is JSON Lines with hex digests") {
  Parties p;
  ledger::Ledger l;
  p.fill(l, 2);
  const auto text = ledger::export_jsonl(l.snapshot());
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["seq"] == n + 1);
    CHECK(j["record_hash"] == ledger::record_hash(l.snapshot()[n]).hex());
    CHECK(j["input_commitment"].get<std::string>().size() == 64);
    ++n;
  }
  CHECK(n == 2);
}

TEST_CASE("chain auditability depth") {
  Parties p;
  ledger::Ledger l;
  l.append(request("a", "b", 0), p.a.secret_key, p.b.secret_key);
  l.append(request("c", "d", 1), p.a.secret_key, p.b.secret_key);
  const auto records = l.snapshot();
  using E = ledger::Edge;
  CHECK(ledger::chain_auditability_depth({E{"a", "b"}, E{"b", "c"}, E{"c", "d"}}, records) == 2);
  CHECK(ledger::chain_auditability_depth({E{"c", "d"}, E{"a", "b"}}, records) == 2);
  CHECK(ledger::chain_auditability_depth({E{"x", "y"}}, records) == 1);
  CHECK(ledger::chain_auditability_depth({}, records) == 0);
}
