#include "govkit/crypto.hpp"

#include <sodium.h>

#include <cstring>

#include "govkit/error.hpp"

namespace govkit {

namespace {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) {
    throw Error(ErrorCode::unsupported_backend, "libsodium failed to initialise");
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "hex string has odd length");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::invalid_argument, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

namespace crypto {

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from(ByteView in) {
  if (in.size() != N) {
    throw Error(ErrorCode::invalid_argument,
                "expected " + std::to_string(N) + " bytes, got " + std::to_string(in.size()));
  }
  FixedBytes out;
  std::memcpy(out.bytes.data(), in.data(), N);
  return out;
}

template struct FixedBytes<32, DigestTag>;
template struct FixedBytes<32, PublicKeyTag>;
template struct FixedBytes<64, SignatureTag>;

SecretKey::~SecretKey() { sodium_memzero(key_.data(), key_.size()); }

PublicKey SecretKey::public_key() const {
  PublicKey pk;
  std::memcpy(pk.bytes.data(), key_.data() + 32, 32);
  return pk;
}

Digest digest(ByteView data) {
  ensure_sodium();
  Digest out;
  crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
  return out;
}

KeyPair generate_keypair(ByteView seed) {
  if (seed.size() != crypto_sign_SEEDBYTES) {
    throw Error(ErrorCode::invalid_argument,
                "keypair seed must be 32 bytes, got " + std::to_string(seed.size()));
  }
  ensure_sodium();
  std::array<std::uint8_t, 64> sk{};
  PublicKey pk;
  crypto_sign_seed_keypair(pk.bytes.data(), sk.data(), seed.data());
  KeyPair kp{pk, SecretKey(sk)};
  sodium_memzero(sk.data(), sk.size());
  return kp;
}

KeyPair generate_keypair() {
  ensure_sodium();
  std::array<std::uint8_t, 32> seed{};
  randombytes_buf(seed.data(), seed.size());
  auto kp = generate_keypair(ByteView(seed.data(), seed.size()));
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

Signature sign(const SecretKey& secret_key, ByteView message) {
  ensure_sodium();
  Signature sig;
  if (crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                           secret_key.data()) != 0) {
    throw Error(ErrorCode::signing_failure, "ed25519 signing failed");
  }
  return sig;
}

bool verify_signature(const PublicKey& public_key, ByteView message, const Signature& signature) {
  ensure_sodium();
  return crypto_sign_verify_detached(signature.bytes.data(), message.data(), message.size(),
                                     public_key.bytes.data()) == 0;
}

bool verify_signature(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != PublicKey::size || signature.size() != Signature::size) {
    return false;
  }
  return verify_signature(PublicKey::from(public_key), message, Signature::from(signature));
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::basic: return "basic";
    case BackendKind::enhanced_bbs_plus: return "bbs+";
    case BackendKind::enhanced_dv_snark: return "dv-snark";
  }
  return "unknown";
}

BackendKind backend_from_string(std::string_view name) {
  if (name == "basic") return BackendKind::basic;
  if (name == "bbs+") return BackendKind::enhanced_bbs_plus;
  if (name == "dv-snark") return BackendKind::enhanced_dv_snark;
  throw Error(ErrorCode::unsupported_backend, "unknown backend '" + std::string(name) + "'");
}

const Backend& backend(BackendKind kind) {
  static const Backend basic{
      BackendKind::basic,
      [](ByteView data) { return digest(data); },
      [](const SecretKey& sk, ByteView msg) { return sign(sk, msg); },
      [](const PublicKey& pk, ByteView msg, const Signature& sig) {
        return verify_signature(pk, msg, sig);
      },
  };
  if (kind != BackendKind::basic) {
    throw Error(ErrorCode::unsupported_backend,
                "backend '" + std::string(to_string(kind)) + "' is not available in this build");
  }
  return basic;
}

std::size_t SignatureCache::DigestHash::operator()(const Digest& d) const noexcept {
  std::size_t h;
  std::memcpy(&h, d.bytes.data(), sizeof h);
  return h;
}

bool SignatureCache::verify(const PublicKey& public_key, ByteView message,
                            const Signature& signature) {
  Bytes keyed;
  keyed.reserve(PublicKey::size + Signature::size + 32);
  keyed.insert(keyed.end(), public_key.bytes.begin(), public_key.bytes.end());
  keyed.insert(keyed.end(), signature.bytes.begin(), signature.bytes.end());
  auto msg_digest = digest(message);
  keyed.insert(keyed.end(), msg_digest.bytes.begin(), msg_digest.bytes.end());
  auto key = digest(keyed);
  {
    std::lock_guard lock(mutex_);
    if (verified_.contains(key)) return true;
  }
  if (!verify_signature(public_key, message, signature)) return false;
  std::lock_guard lock(mutex_);
  verified_.insert(key);
  return true;
}

std::size_t SignatureCache::size() const {
  std::lock_guard lock(mutex_);
  return verified_.size();
}

}  // namespace crypto
}  // namespace govkit
