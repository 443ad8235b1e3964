#pragma once

// JSON views of the library types and the small file formats the command
// line reads: manifests, subjects, key files, revocation lists and labelled
// text pairs. Field names follow the type field names.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "govkit/budget.hpp"
#include "govkit/calibration.hpp"
#include "govkit/certificates.hpp"
#include "govkit/harness.hpp"
#include "govkit/ledger.hpp"
#include "govkit/replay.hpp"
#include "govkit/verifier.hpp"

namespace govkit::json_io {

using Json = nlohmann::ordered_json;

// Reads a whole file. Throws Error(storage_failure) when it cannot be read.
std::string read_file(const std::filesystem::path& path);
// Replaces the file contents. Throws Error(storage_failure).
void write_file(const std::filesystem::path& path, std::string_view contents);
// Parses JSON text. Throws Error(malformed).
Json parse(std::string_view text);

// {"entries": [{"sid", "ver", "h" (hex) | "api_schema", "scopes"}]}. An entry
// with api_schema instead of h gets the descriptor hash of its sid, ver and
// schema. Throws Error(malformed) on shape errors.
cert::SkillsManifest manifest_from_json(const Json& j);
Json to_json(const cert::SkillsManifest& manifest);

// Issuance request: every SubjectFields member except public_key and
// manifest_hash, which the caller supplies from key and manifest files.
cert::SubjectFields subject_from_json(const Json& j);

Json to_json(const cert::Certificate& certificate);
Json to_json(const verifier::AccessDecision& decision);
Json to_json(const ledger::AuditReport& report);
Json to_json(const repro::SimilarityReport& report);
Json to_json(const repro::ReplayVerdict& verdict);
Json to_json(const repro::VerificationBudget& budget);
Json to_json(const repro::CalibrationReport& report);
Json to_json(const harness::RunReport& report);
Json to_json(const harness::BaselineMatrix& matrix);
Json to_json(const std::vector<harness::ScalingRow>& rows);

// Key file: {"id", "public_key", "secret_seed"} with hex values.
struct KeyFile {
  std::string id;
  crypto::KeyPair keys;
};
KeyFile key_from_json(const Json& j);
Json to_json(const KeyFile& key);

// One {"cert_id", "revoked_at"} object per line.
verifier::RevocationRegistry revocations_from_jsonl(std::string_view text);
std::string revocations_to_jsonl(const verifier::RevocationRegistry& registry);

struct TextPair {
  std::string text_a;
  std::string text_b;
  bool label = false;  // true when both texts come from the same model
};
// One {"text_a", "text_b", "label"} object per line; blank lines are skipped.
std::vector<TextPair> pairs_from_jsonl(std::string_view text);

}  // namespace govkit::json_io
