#pragma once

// Minimal deterministic CBOR (RFC 8949 core deterministic encoding) for the
// subset this library emits: unsigned integers, byte strings, text strings,
// definite-length arrays and text-keyed maps. The decoder is strict: it
// rejects anything the encoder would not have produced, so decode followed by
// encode is the identity on accepted inputs.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "govkit/crypto.hpp"

namespace govkit::cbor {

class Encoder {
 public:
  Encoder& uint(std::uint64_t value);
  Encoder& bytes(ByteView value);
  Encoder& text(std::string_view value);
  Encoder& array(std::size_t count);
  Encoder& map(std::size_t count);

  // Keys are ordered by their encoded form (bytewise), as the core
  // deterministic rules require.
  Encoder& text_map(const std::map<std::string, std::string>& entries);

  Encoder& raw(ByteView encoded);

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  void head(std::uint8_t major, std::uint64_t value);
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(ByteView input) : in_(input) {}

  std::uint64_t uint();
  Bytes bytes();
  std::string text();
  std::size_t array();
  std::size_t map();
  std::map<std::string, std::string> text_map();

  // Fixed-size byte string; throws unless the length matches exactly.
  template <typename Fixed>
  Fixed fixed() {
    auto b = bytes();
    if (b.size() != Fixed::size) {
      throw_malformed("byte string has wrong length");
    }
    return Fixed::from(b);
  }

  void expect_array(std::size_t count);
  bool at_end() const { return pos_ == in_.size(); }
  void expect_end();
  std::size_t position() const { return pos_; }

 private:
  std::uint64_t head(std::uint8_t expected_major);
  [[noreturn]] void throw_malformed(const std::string& what) const;

  ByteView in_;
  std::size_t pos_ = 0;
};

bool is_valid_utf8(std::string_view s);

}  // namespace govkit::cbor
