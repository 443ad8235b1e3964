#pragma once

// Bilaterally signed, hash-chained interaction ledger. Records carry only
// commitments to the exchanged content, never the content itself.
//
// Storage format: a sequence of frames, each a little-endian u32 length
// followed by that many bytes of deterministic CBOR for one record.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "govkit/certificates.hpp"
#include "govkit/crypto.hpp"

namespace govkit::ledger {

using crypto::Digest;
using crypto::PublicKey;
using crypto::SecretKey;
using crypto::Signature;

enum class Marker : std::uint8_t { PARTIAL_VERIFIABILITY = 0 };
std::string_view to_string(Marker marker);

struct ReproAnchor {
  std::uint64_t seed = 0;
  std::string model_ver;
  Digest skills_hash;

  friend bool operator==(const ReproAnchor&, const ReproAnchor&) = default;
};

struct InteractionRecord {
  std::uint64_t seq = 0;
  cert::Timestamp timestamp = 0;
  std::string sender_id;
  std::string receiver_id;
  Digest sender_cert_hash;
  Digest receiver_cert_hash;
  Digest input_commitment;
  Digest output_commitment;
  ReproAnchor anchor;
  Digest prev_hash;
  std::set<Marker> markers;
  Signature sender_sig;
  Signature receiver_sig;

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

// Deterministic CBOR of every field except the two signatures.
Bytes encode_body(const InteractionRecord& record);
// Message both parties sign: a fixed context label followed by encode_body.
Bytes signing_message(const InteractionRecord& record);
Bytes encode_record(const InteractionRecord& record);
// Throws Error(malformed).
InteractionRecord decode_record(ByteView bytes);
// Digest of the full encoding, signatures included.
Digest record_hash(const InteractionRecord& record);

// Caller-supplied fields of a new record. Commitments are raw bytes so that a
// wrong length is rejected at append time rather than unrepresentable.
struct AppendRequest {
  cert::Timestamp timestamp = 0;
  std::string sender_id;
  std::string receiver_id;
  Bytes sender_cert_hash;
  Bytes receiver_cert_hash;
  Bytes input_commitment;
  Bytes output_commitment;
  ReproAnchor anchor;
  std::set<Marker> markers;
};

// Agent id to verification key, as trusted by the auditor.
using KeyDirectory = std::map<std::string, PublicKey>;

class Ledger {
 public:
  // In-memory ledger.
  Ledger() = default;
  // File-backed ledger. Existing frames are loaded and must decode; new
  // records are appended to the file before append() returns, and flushed to
  // stable storage when `durable` is set.
  static Ledger open(const std::filesystem::path& path, bool durable = true);

  Ledger(Ledger&& other) noexcept;
  Ledger& operator=(Ledger&& other) noexcept;
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;
  ~Ledger();

  // Assigns seq and prev_hash, collects both signatures and persists the
  // record. Throws Error(malformed) for digests that are not 32 bytes and
  // Error(storage_failure) on I/O errors; the ledger is unchanged on throw.
  InteractionRecord append(const AppendRequest& request, const SecretKey& sender_key,
                           const SecretKey& receiver_key);

  // Consistent copy of the records appended so far.
  std::vector<InteractionRecord> snapshot() const;
  std::size_t size() const;
  Digest head_hash() const;
  // Framed bytes of the current contents, identical to the file format.
  Bytes serialize() const;

 private:
  mutable std::shared_mutex mutex_;
  std::vector<InteractionRecord> records_;
  Bytes framed_;
  Digest head_;
  int fd_ = -1;
  bool durable_ = false;
};

// Frames `record` for storage.
void append_frame(Bytes& out, ByteView encoded_record);
// Splits storage bytes into record encodings. Throws Error(malformed) on a
// truncated or oversized frame.
std::vector<ByteView> split_frames(ByteView storage);
// Decodes every frame. Throws Error(malformed).
std::vector<InteractionRecord> parse_storage(ByteView storage);

enum class AuditFailure { SIG_SENDER, SIG_RECEIVER, CHAIN_BREAK, SEQ_GAP, MALFORMED };
std::string_view to_string(AuditFailure failure);

struct AuditReport {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_seq;
  std::optional<AuditFailure> failure;
  std::uint64_t records_checked = 0;
  std::string detail;
};

// State carried between audit segments: the seq expected next, the hash the
// next record must link to, and where its frame starts in storage.
struct AuditCheckpoint {
  std::uint64_t next_seq = 1;
  Digest prev_hash;
  std::size_t offset = 0;
};

// Walks records in order checking seq continuity, hash linkage, the sender
// signature and the receiver signature, and stops at the first failure.
// first_bad_seq is the 1-based position of the offending record. An unknown
// signer is reported as a failed signature of that party.
AuditReport audit(const std::vector<InteractionRecord>& records, const KeyDirectory& keys);
AuditReport audit(const Ledger& ledger, const KeyDirectory& keys);
// Audits raw storage bytes; undecodable frames are MALFORMED.
AuditReport audit_storage(ByteView storage, const KeyDirectory& keys);
// Audits the storage suffix starting at `from`. With a checkpoint taken from a
// clean audit of an unchanged prefix this equals a full audit.
AuditReport audit_storage(ByteView storage, const KeyDirectory& keys, const AuditCheckpoint& from);
// Checkpoint before each frame, plus one past the end, for clean storage.
std::vector<AuditCheckpoint> checkpoints(ByteView storage);

using Edge = std::pair<std::string, std::string>;

// Smallest 1-based j whose edge has no record with that (sender, receiver);
// path.size() when every edge is recorded.
std::size_t chain_auditability_depth(const std::vector<Edge>& path, const std::vector<InteractionRecord>& records);

// JSON Lines with lowercase hex digests, one record per line.
std::string export_jsonl(const std::vector<InteractionRecord>& records);

}  // namespace govkit::ledger
