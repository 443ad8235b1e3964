#include "govkit/executors.hpp"

#include <array>
#include <cstring>

#include "govkit/error.hpp"

namespace govkit::repro {

namespace {

constexpr std::array<std::string_view, 64> kVocabulary = {
    "agent",    "audit",    "binding",  "budget",   "chain",   "commit",  "context",  "credential",
    "data",     "delegate", "depth",    "digest",   "domain",  "entry",   "evidence", "execute",
    "field",    "forensic", "govern",   "hash",     "input",   "issue",   "key",      "ledger",
    "limit",    "manifest", "model",    "monitor",  "node",    "output",  "parent",   "path",
    "policy",   "prompt",   "provider", "query",    "rate",    "record",  "replay",   "report",
    "request",  "result",   "review",   "root",     "route",   "scope",   "search",   "seed",
    "sender",   "signal",   "skill",    "source",   "summary", "task",    "tier",     "token",
    "tool",     "trace",    "trust",    "update",   "verify",  "version", "window",   "write",
};

// Counter-mode byte stream over SHA-256 of a fixed prefix.
class HashStream {
 public:
  explicit HashStream(Bytes prefix) : prefix_(std::move(prefix)) {}

  std::uint8_t next() {
    if (pos_ == block_.bytes.size()) refill();
    return block_.bytes[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | next();
    return v;
  }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  void refill() {
    Bytes msg = prefix_;
    for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(counter_ >> (8 * i)));
    ++counter_;
    block_ = crypto::digest(msg);
    pos_ = 0;
  }

  Bytes prefix_;
  crypto::Digest block_;
  std::size_t pos_ = 32;
  std::uint64_t counter_ = 0;
};

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_text(Bytes& out, std::string_view s) {
  put_u64(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

}  // namespace

DeterministicExecutor::DeterministicExecutor(cert::ModelBinding model, std::size_t words)
    : model_(std::move(model)), words_(words) {}

std::string DeterministicExecutor::execute(ByteView input, std::uint64_t seed, const Config& config) {
  Bytes prefix;
  put_text(prefix, "govkit/mock-model");
  put_text(prefix, model_.provider);
  put_text(prefix, model_.model_id);
  put_text(prefix, model_.model_ver);
  put_u64(prefix, seed);
  for (const auto& [k, v] : config) {
    put_text(prefix, k);
    put_text(prefix, v);
  }
  put_text(prefix, std::string_view(reinterpret_cast<const char*>(input.data()), input.size()));
  HashStream stream(std::move(prefix));
  std::string out;
  for (std::size_t i = 0; i < words_; ++i) {
    if (i) out.push_back(' ');
    out.append(kVocabulary[stream.next() % kVocabulary.size()]);
  }
  return out;
}

ParaphraseNoiseExecutor::ParaphraseNoiseExecutor(std::shared_ptr<ModelExecutor> inner, double rate,
                                                 std::uint64_t noise_seed)
    : inner_(std::move(inner)), rate_(rate), noise_seed_(noise_seed) {
  if (!inner_) throw Error(ErrorCode::invalid_argument, "noise wrapper needs an executor");
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorCode::domain_error, "noise rate must be in [0, 1]");
}

std::string ParaphraseNoiseExecutor::execute(ByteView input, std::uint64_t seed, const Config& config) {
  auto text = inner_->execute(input, seed, config);
  Bytes prefix;
  put_text(prefix, "govkit/paraphrase-noise");
  put_u64(prefix, noise_seed_);
  put_u64(prefix, calls_++);
  HashStream stream(std::move(prefix));
  std::size_t word_start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ' ') continue;
    if (i > word_start && stream.next_unit() < rate_) {
      const auto at = word_start + stream.next() % (i - word_start);
      const char replacement = static_cast<char>('a' + stream.next() % 26);
      text[at] = replacement == text[at] ? static_cast<char>('a' + (replacement - 'a' + 1) % 26) : replacement;
    }
    word_start = i + 1;
  }
  return text;
}

std::string adversarial_text(ByteView input, std::size_t length, std::uint64_t salt) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  Bytes prefix;
  put_text(prefix, "govkit/adversary-text");
  put_u64(prefix, salt);
  prefix.insert(prefix.end(), input.begin(), input.end());
  HashStream stream(std::move(prefix));
  std::string out(length, 'X');
  for (auto& c : out) c = kAlphabet[stream.next() % (sizeof kAlphabet - 1)];
  return out;
}

AdversarialExecutor::AdversarialExecutor(std::shared_ptr<ModelExecutor> honest, double divergence,
                                         std::uint64_t salt)
    : honest_(std::move(honest)), divergence_(divergence), salt_(salt) {
  if (!honest_) throw Error(ErrorCode::invalid_argument, "adversary needs an honest executor to imitate");
  if (!(divergence >= 0.0 && divergence <= 1.0)) {
    throw Error(ErrorCode::domain_error, "divergence must be in [0, 1]");
  }
}

bool AdversarialExecutor::diverges_on(ByteView input) const {
  Bytes prefix;
  put_text(prefix, "govkit/adversary-select");
  put_u64(prefix, salt_);
  prefix.insert(prefix.end(), input.begin(), input.end());
  return HashStream(std::move(prefix)).next_unit() < divergence_;
}

std::string AdversarialExecutor::execute(ByteView input, std::uint64_t seed, const Config& config) {
  auto honest = honest_->execute(input, seed, config);
  if (!diverges_on(input)) return honest;
  return adversarial_text(input, honest.size(), salt_);
}

}  // namespace govkit::repro
