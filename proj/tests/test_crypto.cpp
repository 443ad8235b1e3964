#include <doctest.h>

#include "govkit/error.hpp"
#include "support.hpp"

using namespace govkit;
using testsupport::oracles;

TEST_CASE("sha256 matches hashlib vectors") {
  for (const auto& v : oracles()["hash"]) {
    std::string input;
    if (v.contains("input_hex")) {
      const auto b = from_hex(v["input_hex"].get<std::string>());
      input.assign(b.begin(), b.end());
    } else {
      input.assign(v["input_text_repeat"][1].get<std::size_t>(), v["input_text_repeat"][0].get<std::string>()[0]);
    }
    CHECK(crypto::digest(input).hex() == v["sha256"].get<std::string>());
  }
}

TEST_CASE("ed25519 matches the cryptography package, including RFC 8032 vectors") {
  for (const auto& v : oracles()["ed25519"]) {
    const auto kp = crypto::generate_keypair(from_hex(v["seed"].get<std::string>()));
    CHECK(kp.public_key.hex() == v["public_key"].get<std::string>());
    const auto msg = from_hex(v["message_hex"].get<std::string>());
    const auto sig = crypto::sign(kp.secret_key, msg);
    CHECK(sig.hex() == v["signature"].get<std::string>());
    CHECK(crypto::verify_signature(kp.public_key, msg, sig));
    CHECK(crypto::verify_signature(kp.public_key.view(), msg, sig.view()));
  }
}

TEST_CASE("signature verification rejects any single-bit change") {
  const auto kp = testsupport::key("bitflip");
  const Bytes msg = {1, 2, 3, 4, 5};
  const auto sig = crypto::sign(kp.secret_key, msg);
  for (std::size_t i = 0; i < sig.bytes.size() * 8; i += 7) {
    auto bad = sig;
    bad.bytes[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8));
    CHECK_FALSE(crypto::verify_signature(kp.public_key, msg, bad));
  }
  auto other = msg;
  other[0] ^= 1;
  CHECK_FALSE(crypto::verify_signature(kp.public_key, other, sig));
  CHECK_FALSE(crypto::verify_signature(testsupport::key("other").public_key, msg, sig));
  CHECK_FALSE(crypto::verify_signature(kp.public_key.view(), msg, ByteView(sig.bytes.data(), 63)));
}

TEST_CASE("secret key round trip and seed length") {
  const auto kp = testsupport::key("roundtrip");
  CHECK(kp.secret_key.public_key() == kp.public_key);
  CHECK(crypto::generate_keypair(kp.secret_key.seed()).public_key == kp.public_key);
  CHECK_THROWS_AS(crypto::generate_keypair(Bytes(31, 0)), Error);
  CHECK(crypto::generate_keypair().public_key != crypto::generate_keypair().public_key);
}

TEST_CASE("hex codec") {
  CHECK(to_hex(Bytes{0x00, 0xab, 0xff}) == "00abff");
  CHECK(from_hex("00ABff") == Bytes{0x00, 0xab, 0xff});
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
  CHECK_THROWS_AS(crypto::Digest::from(Bytes(31, 0)), Error);
}

TEST_CASE("backends: basic is wired to the library primitives, enhanced kinds are refused") {
  const auto& b = crypto::backend(crypto::BackendKind::basic);
  const auto kp = testsupport::key("backend");
  const Bytes msg = {9, 9};
  CHECK(b.digest(msg) == crypto::digest(msg));
  CHECK(b.verify(kp.public_key, msg, b.sign(kp.secret_key, msg)));
  try {
    crypto::backend(crypto::BackendKind::enhanced_bbs_plus);
    FAIL("expected unsupported_backend");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_backend);
  }
  CHECK_THROWS_AS(crypto::backend(crypto::BackendKind::enhanced_dv_snark), Error);
  CHECK(crypto::backend_from_string(crypto::to_string(crypto::BackendKind::basic)) == crypto::BackendKind::basic);
  CHECK_THROWS_AS(crypto::backend_from_string("rsa"), Error);
}

TEST_CASE("signature cache only remembers successes") {
  crypto::SignatureCache cache;
  const auto kp = testsupport::key("cache");
  const Bytes msg = {1};
  const auto sig = crypto::sign(kp.secret_key, msg);
  auto bad = sig;
  bad.bytes[0] ^= 1;
  CHECK_FALSE(cache.verify(kp.public_key, msg, bad));
  CHECK(cache.size() == 0);
  CHECK(cache.verify(kp.public_key, msg, sig));
  CHECK(cache.verify(kp.public_key, msg, sig));
  CHECK(cache.size() == 1);
  CHECK_FALSE(cache.verify(kp.public_key, msg, bad));
}
