#pragma once

// Hashing and signing primitives behind a backend seam. The basic backend
// (SHA-256 + Ed25519) is the only one implemented; enhanced backends are
// declared so configuration can name them, and selecting one fails loudly.

#include <array>
#include <compare>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace govkit {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);  // throws Error(invalid_argument)

namespace crypto {

template <std::size_t N, typename Tag>
struct FixedBytes {
  static constexpr std::size_t size = N;
  std::array<std::uint8_t, N> bytes{};

  ByteView view() const { return {bytes.data(), bytes.size()}; }
  std::string hex() const { return to_hex(view()); }

  // Throws Error(invalid_argument) unless `in` is exactly N bytes.
  static FixedBytes from(ByteView in);
  static FixedBytes from_hex(std::string_view hex) { return from(govkit::from_hex(hex)); }

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

struct DigestTag {};
struct PublicKeyTag {};
struct SignatureTag {};

using Digest = FixedBytes<32, DigestTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;

// Ed25519 signing key. Holds the 32-byte seed followed by the public key;
// wiped on destruction.
class SecretKey {
 public:
  SecretKey() = default;
  explicit SecretKey(const std::array<std::uint8_t, 64>& expanded) : key_(expanded) {}
  SecretKey(const SecretKey&) = default;
  SecretKey& operator=(const SecretKey&) = default;
  ~SecretKey();

  ByteView seed() const { return {key_.data(), 32}; }
  PublicKey public_key() const;
  const std::uint8_t* data() const { return key_.data(); }

 private:
  std::array<std::uint8_t, 64> key_{};
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
};

Digest digest(ByteView data);
inline Digest digest(std::string_view s) { return digest(as_bytes(s)); }

// Deterministic from the 32-byte seed; throws Error(invalid_argument) on any
// other length.
KeyPair generate_keypair(ByteView seed);
// Production path: seed drawn from OS entropy.
KeyPair generate_keypair();

Signature sign(const SecretKey& secret_key, ByteView message);

// Total: malformed keys or signatures yield false.
bool verify_signature(const PublicKey& public_key, ByteView message, const Signature& signature);
bool verify_signature(ByteView public_key, ByteView message, ByteView signature);

enum class BackendKind { basic, enhanced_bbs_plus, enhanced_dv_snark };

std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view name);

struct Backend {
  BackendKind kind;
  Digest (*digest)(ByteView);
  Signature (*sign)(const SecretKey&, ByteView);
  bool (*verify)(const PublicKey&, ByteView, const Signature&);
};

// Throws Error(unsupported_backend) for the enhanced kinds.
const Backend& backend(BackendKind kind);

// Remembers (key, message, signature) triples that already verified. Only
// successes are cached, so a forged triple is always checked afresh.
class SignatureCache {
 public:
  bool verify(const PublicKey& public_key, ByteView message, const Signature& signature);
  std::size_t size() const;

 private:
  struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept;
  };
  mutable std::mutex mutex_;
  std::unordered_set<Digest, DigestHash> verified_;
};

}  // namespace crypto
}  // namespace govkit
