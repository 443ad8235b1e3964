#include "govkit/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>

#include <json.hpp>

#include "govkit/cbor.hpp"
#include "govkit/error.hpp"

namespace govkit::ledger {

namespace {

constexpr std::string_view kSigningContext = "govkit/ledger/v1";
constexpr std::size_t kMaxFrame = 1u << 20;

[[noreturn]] void storage_error(const std::string& what) {
  throw Error(ErrorCode::storage_failure, what + ": " + std::strerror(errno));
}

void encode_fields(cbor::Encoder& enc, const InteractionRecord& r) {
  enc.uint(r.seq).uint(r.timestamp).text(r.sender_id).text(r.receiver_id);
  enc.bytes(r.sender_cert_hash.view()).bytes(r.receiver_cert_hash.view());
  enc.bytes(r.input_commitment.view()).bytes(r.output_commitment.view());
  enc.array(3).uint(r.anchor.seed).text(r.anchor.model_ver).bytes(r.anchor.skills_hash.view());
  enc.bytes(r.prev_hash.view());
  enc.array(r.markers.size());
  for (auto m : r.markers) enc.uint(static_cast<std::uint64_t>(m));
}

Digest checked_digest(const Bytes& b, const char* field) {
  if (b.size() != Digest::size) {
    throw Error(ErrorCode::malformed, std::string(field) + " must be 32 bytes, got " + std::to_string(b.size()));
  }
  return Digest::from(b);
}

AuditReport fail(AuditFailure failure, std::uint64_t position, std::uint64_t checked, std::string detail) {
  return AuditReport{false, position, failure, checked, std::move(detail)};
}

// Checks one decoded record against the running state, in audit order.
std::optional<AuditReport> check_record(const InteractionRecord& r, std::uint64_t position,
                                        const Digest& expected_prev, const KeyDirectory& keys,
                                        std::uint64_t checked) {
  if (r.seq != position) {
    return fail(AuditFailure::SEQ_GAP, position, checked,
                "expected seq " + std::to_string(position) + ", found " + std::to_string(r.seq));
  }
  if (r.prev_hash != expected_prev) {
    return fail(AuditFailure::CHAIN_BREAK, position, checked, "h_prev does not match the predecessor's hash");
  }
  const auto msg = signing_message(r);
  auto sender = keys.find(r.sender_id);
  if (sender == keys.end() || !crypto::verify_signature(sender->second, msg, r.sender_sig)) {
    return fail(AuditFailure::SIG_SENDER, position, checked,
                sender == keys.end() ? "no key for sender '" + r.sender_id + "'" : "sender signature invalid");
  }
  auto receiver = keys.find(r.receiver_id);
  if (receiver == keys.end() || !crypto::verify_signature(receiver->second, msg, r.receiver_sig)) {
    return fail(AuditFailure::SIG_RECEIVER, position, checked,
                receiver == keys.end() ? "no key for receiver '" + r.receiver_id + "'"
                                       : "receiver signature invalid");
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Marker) { return "PARTIAL_VERIFIABILITY"; }

std::string_view to_string(AuditFailure failure) {
  switch (failure) {
    case AuditFailure::SIG_SENDER: return "SIG_SENDER";
    case AuditFailure::SIG_RECEIVER: return "SIG_RECEIVER";
    case AuditFailure::CHAIN_BREAK: return "CHAIN_BREAK";
    case AuditFailure::SEQ_GAP: return "SEQ_GAP";
    case AuditFailure::MALFORMED: return "MALFORMED";
  }
  return "UNKNOWN";
}

Bytes encode_body(const InteractionRecord& r) {
  cbor::Encoder enc;
  enc.array(11);
  encode_fields(enc, r);
  return std::move(enc).take();
}

Bytes signing_message(const InteractionRecord& r) {
  Bytes msg(kSigningContext.begin(), kSigningContext.end());
  auto body = encode_body(r);
  msg.insert(msg.end(), body.begin(), body.end());
  return msg;
}

Bytes encode_record(const InteractionRecord& r) {
  cbor::Encoder enc;
  enc.array(13);
  encode_fields(enc, r);
  enc.bytes(r.sender_sig.view()).bytes(r.receiver_sig.view());
  return std::move(enc).take();
}

InteractionRecord decode_record(ByteView bytes) {
  cbor::Decoder dec(bytes);
  InteractionRecord r;
  dec.expect_array(13);
  r.seq = dec.uint();
  r.timestamp = dec.uint();
  r.sender_id = dec.text();
  r.receiver_id = dec.text();
  r.sender_cert_hash = dec.fixed<Digest>();
  r.receiver_cert_hash = dec.fixed<Digest>();
  r.input_commitment = dec.fixed<Digest>();
  r.output_commitment = dec.fixed<Digest>();
  dec.expect_array(3);
  r.anchor.seed = dec.uint();
  r.anchor.model_ver = dec.text();
  r.anchor.skills_hash = dec.fixed<Digest>();
  r.prev_hash = dec.fixed<Digest>();
  const auto n_markers = dec.array();
  std::optional<std::uint64_t> previous;
  for (std::size_t i = 0; i < n_markers; ++i) {
    const auto m = dec.uint();
    if (m > static_cast<std::uint64_t>(Marker::PARTIAL_VERIFIABILITY) || (previous && *previous >= m)) {
      throw Error(ErrorCode::malformed, "record markers are unknown or not strictly sorted");
    }
    previous = m;
    r.markers.insert(static_cast<Marker>(m));
  }
  r.sender_sig = dec.fixed<Signature>();
  r.receiver_sig = dec.fixed<Signature>();
  dec.expect_end();
  return r;
}

Digest record_hash(const InteractionRecord& r) { return crypto::digest(encode_record(r)); }

void append_frame(Bytes& out, ByteView encoded) {
  const auto n = static_cast<std::uint32_t>(encoded.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), encoded.begin(), encoded.end());
}

std::vector<ByteView> split_frames(ByteView storage) {
  std::vector<ByteView> out;
  std::size_t pos = 0;
  while (pos < storage.size()) {
    if (storage.size() - pos < 4) throw Error(ErrorCode::malformed, "truncated frame header");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(storage[pos + i]) << (8 * i);
    pos += 4;
    if (n > kMaxFrame || n > storage.size() - pos) throw Error(ErrorCode::malformed, "frame overruns storage");
    out.push_back(storage.subspan(pos, n));
    pos += n;
  }
  return out;
}

std::vector<InteractionRecord> parse_storage(ByteView storage) {
  std::vector<InteractionRecord> out;
  for (auto frame : split_frames(storage)) out.push_back(decode_record(frame));
  return out;
}

Ledger Ledger::open(const std::filesystem::path& path, bool durable) {
  Ledger ledger;
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      ledger.framed_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
  }
  for (auto frame : split_frames(ledger.framed_)) {
    ledger.records_.push_back(decode_record(frame));
    ledger.head_ = crypto::digest(frame);
  }
  ledger.fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (ledger.fd_ < 0) storage_error("cannot open ledger '" + path.string() + "'");
  ledger.durable_ = durable;
  return ledger;
}

Ledger::Ledger(Ledger&& other) noexcept
    : records_(std::move(other.records_)),
      framed_(std::move(other.framed_)),
      head_(other.head_),
      fd_(std::exchange(other.fd_, -1)),
      durable_(other.durable_) {}

Ledger& Ledger::operator=(Ledger&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    records_ = std::move(other.records_);
    framed_ = std::move(other.framed_);
    head_ = other.head_;
    fd_ = std::exchange(other.fd_, -1);
    durable_ = other.durable_;
  }
  return *this;
}

Ledger::~Ledger() {
  if (fd_ >= 0) ::close(fd_);
}

InteractionRecord Ledger::append(const AppendRequest& request, const SecretKey& sender_key,
                                 const SecretKey& receiver_key) {
  InteractionRecord r;
  r.timestamp = request.timestamp;
  r.sender_id = request.sender_id;
  r.receiver_id = request.receiver_id;
  r.sender_cert_hash = checked_digest(request.sender_cert_hash, "sender_cert_hash");
  r.receiver_cert_hash = checked_digest(request.receiver_cert_hash, "receiver_cert_hash");
  r.input_commitment = checked_digest(request.input_commitment, "input_commitment");
  r.output_commitment = checked_digest(request.output_commitment, "output_commitment");
  r.anchor = request.anchor;
  r.markers = request.markers;

  std::unique_lock lock(mutex_);
  r.seq = records_.size() + 1;
  r.prev_hash = head_;
  const auto msg = signing_message(r);
  r.sender_sig = crypto::sign(sender_key, msg);
  r.receiver_sig = crypto::sign(receiver_key, msg);

  const auto encoded = encode_record(r);
  Bytes frame;
  append_frame(frame, encoded);
  if (fd_ >= 0) {
    std::size_t written = 0;
    while (written < frame.size()) {
      auto n = ::write(fd_, frame.data() + written, frame.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        storage_error("ledger write failed");
      }
      written += static_cast<std::size_t>(n);
    }
    if (durable_ && ::fdatasync(fd_) != 0) storage_error("ledger sync failed");
  }
  framed_.insert(framed_.end(), frame.begin(), frame.end());
  head_ = crypto::digest(encoded);
  records_.push_back(r);
  return r;
}

std::vector<InteractionRecord> Ledger::snapshot() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::size_t Ledger::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

Digest Ledger::head_hash() const {
  std::shared_lock lock(mutex_);
  return head_;
}

Bytes Ledger::serialize() const {
  std::shared_lock lock(mutex_);
  return framed_;
}

AuditReport audit(const std::vector<InteractionRecord>& records, const KeyDirectory& keys) {
  Digest prev{};
  std::uint64_t position = 0;
  for (const auto& r : records) {
    ++position;
    if (auto bad = check_record(r, position, prev, keys, position - 1)) return *bad;
    prev = record_hash(r);
  }
  return AuditReport{true, std::nullopt, std::nullopt, position, {}};
}

AuditReport audit(const Ledger& ledger, const KeyDirectory& keys) { return audit(ledger.snapshot(), keys); }

AuditReport audit_storage(ByteView storage, const KeyDirectory& keys) {
  return audit_storage(storage, keys, AuditCheckpoint{});
}

AuditReport audit_storage(ByteView storage, const KeyDirectory& keys, const AuditCheckpoint& from) {
  std::uint64_t position = from.next_seq;
  Digest prev = from.prev_hash;
  std::size_t pos = from.offset;
  std::uint64_t checked = 0;
  while (pos < storage.size()) {
    if (storage.size() - pos < 4) return fail(AuditFailure::MALFORMED, position, checked, "truncated frame header");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(storage[pos + i]) << (8 * i);
    pos += 4;
    if (n > kMaxFrame || n > storage.size() - pos) {
      return fail(AuditFailure::MALFORMED, position, checked, "frame overruns storage");
    }
    const auto frame = storage.subspan(pos, n);
    pos += n;
    InteractionRecord r;
    try {
      r = decode_record(frame);
    } catch (const Error& e) {
      return fail(AuditFailure::MALFORMED, position, checked, e.what());
    }
    if (auto bad = check_record(r, position, prev, keys, checked)) return *bad;
    prev = crypto::digest(frame);
    ++position;
    ++checked;
  }
  return AuditReport{true, std::nullopt, std::nullopt, checked, {}};
}

std::vector<AuditCheckpoint> checkpoints(ByteView storage) {
  std::vector<AuditCheckpoint> out;
  AuditCheckpoint cp;
  out.push_back(cp);
  for (auto frame : split_frames(storage)) {
    cp.offset += 4 + frame.size();
    cp.next_seq += 1;
    cp.prev_hash = crypto::digest(frame);
    out.push_back(cp);
  }
  return out;
}

std::size_t chain_auditability_depth(const std::vector<Edge>& path, const std::vector<InteractionRecord>& records) {
  std::set<Edge> recorded;
  for (const auto& r : records) recorded.emplace(r.sender_id, r.receiver_id);
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (!recorded.contains(path[j])) return j + 1;
  }
  return path.size();
}

std::string export_jsonl(const std::vector<InteractionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json markers = nlohmann::ordered_json::array();
    for (auto m : r.markers) markers.push_back(to_string(m));
    nlohmann::ordered_json j{
        {"seq", r.seq},
        {"timestamp", r.timestamp},
        {"sender_id", r.sender_id},
        {"receiver_id", r.receiver_id},
        {"sender_cert_hash", r.sender_cert_hash.hex()},
        {"receiver_cert_hash", r.receiver_cert_hash.hex()},
        {"input_commitment", r.input_commitment.hex()},
        {"output_commitment", r.output_commitment.hex()},
        {"anchor", {{"seed", r.anchor.seed}, {"model_ver", r.anchor.model_ver},
                    {"skills_hash", r.anchor.skills_hash.hex()}}},
        {"prev_hash", r.prev_hash.hex()},
        {"markers", markers},
        {"sender_sig", r.sender_sig.hex()},
        {"receiver_sig", r.receiver_sig.hex()},
        {"record_hash", record_hash(r).hex()},
    };
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace govkit::ledger
