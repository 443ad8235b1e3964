#include <doctest.h>

#include <random>

#include "govkit/cbor.hpp"
#include "govkit/error.hpp"

using namespace govkit;

namespace {
Bytes enc_uint(std::uint64_t v) {
  cbor::Encoder e;
  e.uint(v);
  return std::move(e).take();
}
}  // namespace

TEST_CASE("unsigned integers use the shortest head") {
  CHECK(enc_uint(0) == Bytes{0x00});
  CHECK(enc_uint(23) == Bytes{0x17});
  CHECK(enc_uint(24) == Bytes{0x18, 0x18});
  CHECK(enc_uint(255) == Bytes{0x18, 0xff});
  CHECK(enc_uint(256) == Bytes{0x19, 0x01, 0x00});
  CHECK(enc_uint(65536) == Bytes{0x1a, 0x00, 0x01, 0x00, 0x00});
  CHECK(enc_uint(4294967296ull) == Bytes{0x1b, 0, 0, 0, 1, 0, 0, 0, 0});
}

TEST_CASE("strings, arrays and maps") {
  cbor::Encoder e;
  e.array(3).text("a").bytes(Bytes{1, 2}).text_map({{"bb", "1"}, {"a", "2"}, {"c", "3"}});
  // Map keys sort by encoded form: shorter keys first.
  CHECK(std::move(e).take() == Bytes{0x83, 0x61, 'a', 0x42, 1, 2, 0xa3, 0x61, 'a', 0x61, '2', 0x61, 'c', 0x61, '3',
                                     0x62, 'b', 'b', 0x61, '1'});
}

TEST_CASE("decoder round trip") {
  cbor::Encoder e;
  e.array(4).uint(1000).text("héllo").bytes(Bytes(40, 7)).text_map({{"k", "v"}});
  const auto bytes = std::move(e).take();
  cbor::Decoder d(bytes);
  d.expect_array(4);
  CHECK(d.uint() == 1000);
  CHECK(d.text() == "héllo");
  CHECK(d.bytes() == Bytes(40, 7));
  CHECK(d.text_map() == std::map<std::string, std::string>{{"k", "v"}});
  CHECK(d.at_end());
  CHECK_NOTHROW(d.expect_end());
}

TEST_CASE("decoder rejects non-canonical and malformed input") {
  auto rejects = [](Bytes b, auto read) {
    cbor::Decoder d(b);
    CHECK_THROWS_AS(read(d), Error);
  };
  rejects({0x18, 0x05}, [](cbor::Decoder& d) { return d.uint(); });                  // non-shortest
  rejects({0x19, 0x00, 0x10}, [](cbor::Decoder& d) { return d.uint(); });            // non-shortest
  rejects({0x20}, [](cbor::Decoder& d) { return d.uint(); });                        // negative int
  rejects({0x1c}, [](cbor::Decoder& d) { return d.uint(); });                        // reserved
  rejects({0x19, 0x01}, [](cbor::Decoder& d) { return d.uint(); });                  // truncated
  rejects({0x62, 'a'}, [](cbor::Decoder& d) { return d.text(); });                   // truncated
  rejects({0x61, 0xff}, [](cbor::Decoder& d) { return d.text(); });                  // invalid UTF-8
  rejects({0x9f}, [](cbor::Decoder& d) { return d.array(); });                       // indefinite
  rejects({0x41, 0x00}, [](cbor::Decoder& d) { return d.text(); });                  // wrong major type
  rejects({0xa2, 0x61, 'b', 0x60, 0x61, 'a', 0x60}, [](cbor::Decoder& d) { return d.text_map(); });  // key order
  rejects({0xa2, 0x61, 'a', 0x60, 0x61, 'a', 0x60}, [](cbor::Decoder& d) { return d.text_map(); });  // duplicate
  rejects({0x01, 0x02}, [](cbor::Decoder& d) {
    d.uint();
    d.expect_end();
    return 0;
  });
}

TEST_CASE("utf8 validation") {
  CHECK(cbor::is_valid_utf8("plain"));
  CHECK(cbor::is_valid_utf8("\xe2\x82\xac"));
  CHECK_FALSE(cbor::is_valid_utf8("\xc0\xaf"));          // overlong
  CHECK_FALSE(cbor::is_valid_utf8("\xed\xa0\x80"));      // surrogate
  CHECK_FALSE(cbor::is_valid_utf8("\xf4\x90\x80\x80"));  // above U+10FFFF
  CHECK_FALSE(cbor::is_valid_utf8("\xe2\x82"));          // truncated
}

TEST_CASE("property: random uint/text/bytes round trip re-encodes identically") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    cbor::Encoder e;
    const auto v = rng() >> (rng() % 64);
    std::string t(rng() % 40, 'x');
    for (auto& c : t) c = static_cast<char>('a' + rng() % 26);
    Bytes b(rng() % 300);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    e.array(3).uint(v).text(t).bytes(b);
    const auto bytes = std::move(e).take();
    cbor::Decoder d(bytes);
    d.expect_array(3);
    cbor::Encoder again;
    again.array(3).uint(d.uint()).text(d.text()).bytes(d.bytes());
    CHECK(std::move(again).take() == bytes);
  }
}
