#include "govkit/json_io.hpp"

#include <fstream>
#include <sstream>

#include "govkit/error.hpp"

namespace govkit::json_io {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string text_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t uint_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned()) malformed(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

template <typename T, typename F>
T enum_field(const Json& j, const char* key, F parse) {
  try {
    return parse(text_field(j, key));
  } catch (const Error& e) {
    malformed(std::string("field '") + key + "': " + e.what());
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json scores_json(const repro::ScoreVector& s) {
  Json out = Json::object();
  for (auto m : repro::kAllMetrics) out[std::string(repro::to_string(m))] = s.get(m);
  return out;
}

Json thresholds_json(const repro::Thresholds& t) {
  Json out = Json::object();
  for (auto m : repro::kAllMetrics) out[std::string(repro::to_string(m))] = t.get(m);
  return out;
}

Json timings_json(const harness::LayerTimings& t) {
  auto ms = [](std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); };
  return Json{{"g1_ms", ms(t.g1)}, {"g2_ms", ms(t.g2)}, {"g3_ms", ms(t.g3)}, {"total_ms", ms(t.total())}};
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::storage_failure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::storage_failure, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::storage_failure, "short write to " + path.string());
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

cert::SkillsManifest manifest_from_json(const Json& j) {
  const auto& entries = field(j, "entries");
  if (!entries.is_array()) malformed("'entries' must be an array");
  cert::SkillsManifest m;
  for (const auto& e : entries) {
    cert::SkillEntry entry;
    entry.sid = text_field(e, "sid");
    entry.ver = text_field(e, "ver");
    if (e.contains("h")) {
      try {
        entry.h = crypto::Digest::from_hex(text_field(e, "h"));
      } catch (const Error&) {
        malformed("entry '" + entry.sid + "': h must be 64 hex digits");
      }
    } else {
      entry.h = cert::descriptor_hash(entry.sid, entry.ver, text_field(e, "api_schema"));
    }
    const auto& scopes = field(e, "scopes");
    if (!scopes.is_array()) malformed("entry '" + entry.sid + "': scopes must be an array");
    for (const auto& s : scopes) {
      if (!s.is_string()) malformed("entry '" + entry.sid + "': scopes must be strings");
      entry.scopes.push_back(s.get<std::string>());
    }
    m.entries.push_back(std::move(entry));
  }
  return cert::normalize(std::move(m));
}

Json to_json(const cert::SkillsManifest& manifest) {
  Json entries = Json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"sid", e.sid}, {"ver", e.ver}, {"h", e.h.hex()}, {"scopes", e.scopes}});
  }
  return Json{{"entries", entries}};
}

cert::SubjectFields subject_from_json(const Json& j) {
  cert::SubjectFields s;
  s.id = text_field(j, "id");
  if (j.contains("model")) {
    const auto& m = j.at("model");
    s.model = {text_field(m, "provider"), text_field(m, "model_id"), text_field(m, "model_ver")};
  }
  const auto& c = field(j, "constraints");
  s.constraints.max_tier = enum_field<cert::Tier>(c, "max_tier", cert::tier_from_string);
  const auto depth = uint_field(c, "max_depth");
  if (depth > UINT32_MAX) malformed("max_depth out of range");
  s.constraints.max_depth = static_cast<std::uint32_t>(depth);
  for (const auto& m : field(c, "allowed_models")) {
    if (!m.is_string()) malformed("allowed_models must be strings");
    s.constraints.allowed_models.insert(m.get<std::string>());
  }
  try {
    s.constraints.max_rate = cert::Rate::parse(text_field(c, "max_rate"));
  } catch (const Error& e) {
    malformed(std::string("max_rate: ") + e.what());
  }
  const auto& r = field(j, "repro");
  s.repro.level = enum_field<cert::ReproLevel>(r, "level", cert::repro_level_from_string);
  if (r.contains("config")) {
    for (const auto& [k, v] : r.at("config").items()) {
      if (!v.is_string()) malformed("repro config values must be strings");
      s.repro.config[k] = v.get<std::string>();
    }
  }
  s.governance_level = enum_field<cert::GovernanceLevel>(j, "governance_level", cert::governance_level_from_string);
  s.node_type = enum_field<cert::NodeType>(j, "node_type", cert::node_type_from_string);
  s.not_before = uint_field(j, "not_before");
  s.not_after = uint_field(j, "not_after");
  return s;
}

Json to_json(const cert::Certificate& c) {
  Json config = Json::object();
  for (const auto& [k, v] : c.repro.config) config[k] = v;
  return Json{
      {"id", c.id},
      {"parent_id", c.parent_id},
      {"public_key", c.public_key.hex()},
      {"model", {{"provider", c.model.provider}, {"model_id", c.model.model_id}, {"model_ver", c.model.model_ver}}},
      {"manifest_hash", c.manifest_hash.hex()},
      {"constraints",
       {{"max_tier", cert::to_string(c.constraints.max_tier)},
        {"max_depth", c.constraints.max_depth},
        {"allowed_models", c.constraints.allowed_models},
        {"max_rate", c.constraints.max_rate.str()}}},
      {"repro", {{"level", cert::to_string(c.repro.level)}, {"config", config}}},
      {"governance_level", cert::to_string(c.governance_level)},
      {"node_type", cert::to_string(c.node_type)},
      {"not_before", c.not_before},
      {"not_after", c.not_after},
      {"issuer_signature", c.issuer_signature.hex()},
      {"certificate_hash", cert::certificate_hash(c).hex()},
  };
}

Json to_json(const verifier::AccessDecision& d) {
  return Json{{"verdict", verifier::to_string(d.verdict)},
              {"reason", verifier::to_string(d.reason)},
              {"phase", d.phase ? Json(*d.phase) : Json(nullptr)},
              {"detail", d.detail}};
}

Json to_json(const ledger::AuditReport& r) {
  return Json{{"ok", r.ok},
              {"first_bad_seq", r.first_bad_seq ? Json(*r.first_bad_seq) : Json(nullptr)},
              {"failure", r.failure ? Json(std::string(ledger::to_string(*r.failure))) : Json(nullptr)},
              {"records_checked", r.records_checked},
              {"detail", r.detail}};
}

Json to_json(const repro::SimilarityReport& r) {
  return Json{{"scores", scores_json(r.scores)},
              {"ensemble_flagged", r.ensemble_flagged},
              {"thresholds_used", thresholds_json(r.thresholds_used)}};
}

Json to_json(const repro::ReplayVerdict& v) {
  return Json{{"verdict", repro::to_string(v.verdict)},
              {"theta", optional_number(v.theta)},
              {"report", v.report ? to_json(*v.report) : Json(nullptr)}};
}

Json to_json(const repro::VerificationBudget& b) {
  return Json{{"n", b.n}, {"alpha", b.alpha}, {"epsilon", b.epsilon}};
}

Json to_json(const repro::CalibrationReport& r) {
  Json metrics = Json::array();
  for (const auto& m : r.metrics) {
    metrics.push_back({{"metric", repro::to_string(m.metric)},
                       {"theta", m.theta},
                       {"youden_j", m.youden_j},
                       {"tpr", m.tpr},
                       {"fpr", m.fpr},
                       {"f1", m.f1},
                       {"same_model_mean", m.same_model_mean},
                       {"cross_model_mean", m.cross_model_mean},
                       {"separation_ratio", optional_number(m.separation_ratio)},
                       {"cohens_d", optional_number(m.cohens_d)},
                       {"cross_model_pass_rate", m.cross_model_pass_rate}});
  }
  return Json{{"same_model_count", r.same_model_count},
              {"cross_model_count", r.cross_model_count},
              {"metrics", metrics}};
}

Json to_json(const harness::RunReport& r) {
  Json detections = Json::array();
  for (const auto& d : r.detections) {
    detections.push_back({{"layer", harness::to_string(d.layer)},
                          {"reason", d.reason},
                          {"seq", d.seq ? Json(*d.seq) : Json(nullptr)},
                          {"subject", d.subject},
                          {"detail", d.detail},
                          {"char_match", optional_number(d.char_match)}});
  }
  Json out{{"schema", "govkit.run-report/1"},
           {"scenario", r.scenario ? Json(std::string(harness::to_string(*r.scenario))) : Json(nullptr)},
           {"mode", harness::to_string(r.mode)},
           {"agent_count", r.agent_count},
           {"governed_calls", r.governed_calls},
           {"ledger_entries", r.ledger_entries},
           {"denials", r.denials},
           {"storage_bytes", r.storage_bytes},
           {"timings", timings_json(r.timings)},
           {"detections", detections},
           {"false_positive_count", r.false_positive_count},
           {"audit", to_json(r.audit)},
           {"replays_verified", r.replays_verified}};
  if (r.scenario) {
    const auto& spec = harness::scenario_spec(*r.scenario);
    out["expected"] = {{"layer", harness::to_string(spec.expected_layer)}, {"reason", spec.expected_reason}};
    out["detected"] = r.detected_as_expected();
  }
  return out;
}

Json to_json(const harness::BaselineMatrix& matrix) {
  Json out = Json::object();
  for (const auto& [mode, row] : matrix) {
    Json cells = Json::object();
    std::size_t detected = 0;
    for (const auto& [scenario, hit] : row) {
      cells[std::string(harness::to_string(scenario))] = hit;
      detected += hit ? 1 : 0;
    }
    out[std::string(harness::to_string(mode))] = {{"detected", detected}, {"of", row.size()}, {"scenarios", cells}};
  }
  return out;
}

Json to_json(const std::vector<harness::ScalingRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"agent_count", r.agent_count},
                   {"ledger_entries", r.ledger_entries},
                   {"mean", timings_json(r.mean)},
                   {"per_agent_ms", r.per_agent_ms},
                   {"g3_share", r.g3_share},
                   {"storage_bytes", r.storage_bytes}});
  }
  return out;
}

KeyFile key_from_json(const Json& j) {
  KeyFile k;
  k.id = text_field(j, "id");
  Bytes seed;
  try {
    seed = from_hex(text_field(j, "secret_seed"));
  } catch (const Error&) {
    malformed("secret_seed must be hex");
  }
  if (seed.size() != 32) malformed("secret_seed must be 32 bytes");
  k.keys = crypto::generate_keypair(seed);
  if (j.contains("public_key") && text_field(j, "public_key") != k.keys.public_key.hex()) {
    malformed("public_key does not match secret_seed");
  }
  return k;
}

Json to_json(const KeyFile& key) {
  return Json{{"id", key.id},
              {"public_key", key.keys.public_key.hex()},
              {"secret_seed", to_hex(key.keys.secret_key.seed())}};
}

verifier::RevocationRegistry revocations_from_jsonl(std::string_view text) {
  verifier::RevocationRegistry registry;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = parse(line);
    registry.revoke(text_field(j, "cert_id"), uint_field(j, "revoked_at"));
  }
  return registry;
}

std::string revocations_to_jsonl(const verifier::RevocationRegistry& registry) {
  std::string out;
  for (const auto& [id, at] : registry.entries()) {
    out += Json{{"cert_id", id}, {"revoked_at", at}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<TextPair> pairs_from_jsonl(std::string_view text) {
  std::vector<TextPair> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = parse(line);
    TextPair p{text_field(j, "text_a"), text_field(j, "text_b"), false};
    const auto& label = field(j, "label");
    if (label.is_boolean()) {
      p.label = label.get<bool>();
    } else if (label.is_number_integer() && (label.get<int>() == 0 || label.get<int>() == 1)) {
      p.label = label.get<int>() == 1;
    } else if (label.is_string() && (label == "same_model" || label == "cross_model")) {
      p.label = label == "same_model";
    } else {
      malformed("label must be a boolean, 0/1, or \"same_model\"/\"cross_model\"");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace govkit::json_io
