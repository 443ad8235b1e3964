#include "govkit/certificates.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <charconv>
#include <numeric>

#include "govkit/cbor.hpp"
#include "govkit/error.hpp"

namespace govkit::cert {

namespace {

constexpr std::string_view kPemBegin = "-----BEGIN AGENT CERT-----";
constexpr std::string_view kPemEnd = "-----END AGENT CERT-----";
constexpr std::string_view kSigningContext = "govkit/cert/v1";

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::invalid_certificate, what); }

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed, what); }

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::invalid_argument, "not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

void encode_fields(cbor::Encoder& enc, const Certificate& c) {
  enc.text(c.id).text(c.parent_id).bytes(c.public_key.view());
  enc.array(3).text(c.model.provider).text(c.model.model_id).text(c.model.model_ver);
  enc.bytes(c.manifest_hash.view());
  enc.array(4).uint(static_cast<std::uint64_t>(c.constraints.max_tier)).uint(c.constraints.max_depth);
  enc.array(c.constraints.allowed_models.size());
  for (const auto& m : c.constraints.allowed_models) enc.text(m);
  enc.array(2).uint(c.constraints.max_rate.num).uint(c.constraints.max_rate.den);
  enc.array(2).uint(static_cast<std::uint64_t>(c.repro.level)).text_map(c.repro.config);
  enc.uint(static_cast<std::uint64_t>(c.governance_level));
  enc.uint(static_cast<std::uint64_t>(c.node_type));
  enc.uint(c.not_before).uint(c.not_after);
}

template <typename Enum>
Enum enum_in_range(std::uint64_t raw, std::uint64_t lo, std::uint64_t hi, const char* what) {
  if (raw < lo || raw > hi) malformed(std::string("out-of-range ") + what);
  return static_cast<Enum>(raw);
}

}  // namespace

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::T0: return "T0";
    case Tier::T1: return "T1";
    case Tier::T2: return "T2";
    case Tier::T3: return "T3";
  }
  return "T?";
}

Tier tier_from_string(std::string_view name) {
  if (name == "T0") return Tier::T0;
  if (name == "T1") return Tier::T1;
  if (name == "T2") return Tier::T2;
  if (name == "T3") return Tier::T3;
  throw Error(ErrorCode::invalid_argument, "unknown tier '" + std::string(name) + "'");
}

std::string_view to_string(NodeType type) { return type == NodeType::NA ? "NA" : "AG"; }

NodeType node_type_from_string(std::string_view name) {
  if (name == "NA") return NodeType::NA;
  if (name == "AG") return NodeType::AG;
  throw Error(ErrorCode::invalid_argument, "unknown node type '" + std::string(name) + "'");
}

std::string_view to_string(ReproLevel level) {
  switch (level) {
    case ReproLevel::full: return "full";
    case ReproLevel::statistical: return "statistical";
    case ReproLevel::none: return "none";
  }
  return "?";
}

ReproLevel repro_level_from_string(std::string_view name) {
  if (name == "full") return ReproLevel::full;
  if (name == "statistical") return ReproLevel::statistical;
  if (name == "none") return ReproLevel::none;
  throw Error(ErrorCode::invalid_argument, "unknown reproducibility level '" + std::string(name) + "'");
}

std::string_view to_string(GovernanceLevel level) {
  switch (level) {
    case GovernanceLevel::L1_posthoc: return "L1_posthoc";
    case GovernanceLevel::L2_sampled: return "L2_sampled";
    case GovernanceLevel::L3_compiletime: return "L3_compiletime";
  }
  return "?";
}

GovernanceLevel governance_level_from_string(std::string_view name) {
  if (name == "L1_posthoc") return GovernanceLevel::L1_posthoc;
  if (name == "L2_sampled") return GovernanceLevel::L2_sampled;
  if (name == "L3_compiletime") return GovernanceLevel::L3_compiletime;
  throw Error(ErrorCode::invalid_argument, "unknown governance level '" + std::string(name) + "'");
}

SkillsManifest normalize(SkillsManifest manifest) {
  for (auto& e : manifest.entries) {
    if (e.sid.empty()) throw Error(ErrorCode::invalid_argument, "skill entry with empty sid");
    std::sort(e.scopes.begin(), e.scopes.end());
    e.scopes.erase(std::unique(e.scopes.begin(), e.scopes.end()), e.scopes.end());
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.sid, a.ver) < std::tie(b.sid, b.ver);
  });
  auto dup = std::adjacent_find(manifest.entries.begin(), manifest.entries.end(),
                                [](const auto& a, const auto& b) { return a.sid == b.sid && a.ver == b.ver; });
  if (dup != manifest.entries.end()) {
    throw Error(ErrorCode::duplicate_entry, "duplicate skill (" + dup->sid + ", " + dup->ver + ")");
  }
  return manifest;
}

Bytes canonical_encode(const SkillsManifest& manifest) {
  const auto norm = normalize(manifest);
  cbor::Encoder enc;
  enc.array(norm.entries.size());
  for (const auto& e : norm.entries) {
    enc.array(4).text(e.sid).text(e.ver).bytes(e.h.view());
    enc.array(e.scopes.size());
    for (const auto& s : e.scopes) enc.text(s);
  }
  return std::move(enc).take();
}

Digest manifest_hash(const SkillsManifest& manifest) { return crypto::digest(canonical_encode(manifest)); }

Digest descriptor_hash(std::string_view name, std::string_view version, std::string_view api_schema) {
  std::string descriptor;
  descriptor.reserve(name.size() + version.size() + api_schema.size() + 2);
  descriptor.append(name).append("|").append(version).append("|").append(api_schema);
  return crypto::digest(descriptor);
}

Rate Rate::make(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorCode::invalid_argument, "rate denominator is zero");
  const auto g = std::gcd(num, den);
  if (num == 0) return Rate{0, 1};
  return Rate{num / g, den / g};
}

Rate Rate::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return make(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12) {
      throw Error(ErrorCode::invalid_argument, "unsupported rate literal '" + std::string(text) + "'");
    }
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : parse_u64(whole);
    const std::uint64_t f = parse_u64(frac);
    if (w > (UINT64_MAX - f) / den) throw Error(ErrorCode::invalid_argument, "rate literal overflows");
    return make(w * den + f, den);
  }
  return make(parse_u64(text), 1);
}

std::string Rate::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

bool operator<=(const Rate& a, const Rate& b) {
  __extension__ typedef unsigned __int128 u128;
  return static_cast<u128>(a.num) * b.den <= static_cast<u128>(b.num) * a.den;
}

bool constraint_leq(const TrustConstraints& a, const TrustConstraints& b) {
  return tier_within(a.max_tier, b.max_tier) && a.max_depth < b.max_depth &&
         std::includes(b.allowed_models.begin(), b.allowed_models.end(), a.allowed_models.begin(),
                       a.allowed_models.end()) &&
         a.max_rate <= b.max_rate;
}

std::optional<double> ReproCommitment::theta() const {
  auto it = config.find("theta");
  if (it == config.end()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void validate_fields(const Certificate& c) {
  if (c.id.empty()) invalid("certificate id is empty");
  if (c.parent_id.empty()) invalid("certificate parent_id is empty");
  if (!(c.not_before < c.not_after)) invalid("validity window is empty (not_before >= not_after)");
  if (c.constraints.max_rate.den == 0) invalid("rate denominator is zero");
  if (c.repro.level == ReproLevel::statistical) {
    auto theta = c.repro.theta();
    if (!theta || !(*theta > 0.0 && *theta <= 1.0)) {
      invalid("statistical reproducibility requires config theta in (0, 1]");
    }
  }
  if (c.governance_level == GovernanceLevel::L3_compiletime && c.repro.level != ReproLevel::full) {
    invalid("governance level L3 requires full reproducibility");
  }
  if (c.node_type == NodeType::AG &&
      (c.model.provider.empty() || c.model.model_id.empty() || c.model.model_ver.empty())) {
    invalid("agent certificate needs provider, model_id and model_ver");
  }
}

Bytes encode_body(const Certificate& cert) {
  cbor::Encoder enc;
  enc.array(11);
  encode_fields(enc, cert);
  return std::move(enc).take();
}

Bytes signing_message(const Certificate& cert) {
  Bytes msg(kSigningContext.begin(), kSigningContext.end());
  auto body = encode_body(cert);
  msg.insert(msg.end(), body.begin(), body.end());
  return msg;
}

Bytes encode_certificate(const Certificate& cert) {
  cbor::Encoder enc;
  enc.array(12);
  encode_fields(enc, cert);
  enc.bytes(cert.issuer_signature.view());
  return std::move(enc).take();
}

Certificate decode_certificate(ByteView bytes) {
  cbor::Decoder dec(bytes);
  Certificate c;
  dec.expect_array(12);
  c.id = dec.text();
  c.parent_id = dec.text();
  c.public_key = dec.fixed<PublicKey>();
  dec.expect_array(3);
  c.model.provider = dec.text();
  c.model.model_id = dec.text();
  c.model.model_ver = dec.text();
  c.manifest_hash = dec.fixed<Digest>();
  dec.expect_array(4);
  c.constraints.max_tier = enum_in_range<Tier>(dec.uint(), 0, 3, "tier");
  const auto depth = dec.uint();
  if (depth > UINT32_MAX) malformed("max_depth out of range");
  c.constraints.max_depth = static_cast<std::uint32_t>(depth);
  const auto n_models = dec.array();
  std::string previous;
  for (std::size_t i = 0; i < n_models; ++i) {
    auto m = dec.text();
    if (i > 0 && !(previous < m)) malformed("allowed_models not strictly sorted");
    previous = m;
    c.constraints.allowed_models.insert(std::move(m));
  }
  dec.expect_array(2);
  const auto num = dec.uint();
  const auto den = dec.uint();
  if (den == 0 || Rate::make(num, den) != Rate{num, den}) malformed("rate not in lowest terms");
  c.constraints.max_rate = Rate{num, den};
  dec.expect_array(2);
  c.repro.level = enum_in_range<ReproLevel>(dec.uint(), 0, 2, "reproducibility level");
  c.repro.config = dec.text_map();
  c.governance_level = enum_in_range<GovernanceLevel>(dec.uint(), 1, 3, "governance level");
  c.node_type = enum_in_range<NodeType>(dec.uint(), 0, 1, "node type");
  c.not_before = dec.uint();
  c.not_after = dec.uint();
  c.issuer_signature = dec.fixed<Signature>();
  dec.expect_end();
  try {
    validate_fields(c);
  } catch (const Error& e) {
    malformed(e.what());
  }
  return c;
}

Digest certificate_hash(const Certificate& cert) { return crypto::digest(encode_certificate(cert)); }

std::string to_pem(const Certificate& cert) {
  const auto der = encode_certificate(cert);
  std::string b64(sodium_base64_ENCODED_LEN(der.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(b64.data(), b64.size(), der.data(), der.size(), sodium_base64_VARIANT_ORIGINAL);
  b64.resize(std::strlen(b64.c_str()));
  std::string out(kPemBegin);
  out.push_back('\n');
  for (std::size_t i = 0; i < b64.size(); i += 64) {
    out.append(b64, i, 64);
    out.push_back('\n');
  }
  out.append(kPemEnd);
  out.push_back('\n');
  return out;
}

std::vector<Certificate> all_from_pem(std::string_view text) {
  std::vector<Certificate> out;
  std::size_t pos = 0;
  while (true) {
    auto begin = text.find(kPemBegin, pos);
    if (begin == std::string_view::npos) break;
    auto body_start = begin + kPemBegin.size();
    auto end = text.find(kPemEnd, body_start);
    if (end == std::string_view::npos) malformed("certificate envelope has no END marker");
    std::string b64;
    for (auto ch : text.substr(body_start, end - body_start)) {
      if (ch != '\n' && ch != '\r' && ch != ' ' && ch != '\t') b64.push_back(ch);
    }
    Bytes der(b64.size());
    std::size_t der_len = 0;
    if (sodium_base642bin(der.data(), der.size(), b64.data(), b64.size(), nullptr, &der_len, nullptr,
                          sodium_base64_VARIANT_ORIGINAL) != 0) {
      malformed("certificate envelope is not valid base64");
    }
    der.resize(der_len);
    out.push_back(decode_certificate(der));
    pos = end + kPemEnd.size();
  }
  return out;
}

Certificate from_pem(std::string_view text) {
  auto certs = all_from_pem(text);
  if (certs.size() != 1) {
    malformed("expected exactly one certificate envelope, found " + std::to_string(certs.size()));
  }
  return std::move(certs.front());
}

namespace {

Certificate from_subject(const SubjectFields& s, std::string parent_id) {
  Certificate c;
  c.id = s.id;
  c.parent_id = std::move(parent_id);
  c.public_key = s.public_key;
  c.model = s.model;
  c.manifest_hash = s.manifest_hash;
  c.constraints = s.constraints;
  c.repro = s.repro;
  c.governance_level = s.governance_level;
  c.node_type = s.node_type;
  c.not_before = s.not_before;
  c.not_after = s.not_after;
  return c;
}

}  // namespace

Certificate sign_unchecked(Certificate body, const SecretKey& key) {
  body.issuer_signature = crypto::sign(key, signing_message(body));
  return body;
}

Certificate issue_root(const SubjectFields& subject, const SecretKey& root_key) {
  if (subject.node_type != NodeType::NA) {
    throw Error(ErrorCode::type_constraint, "trust anchors must be non-agent nodes");
  }
  if (root_key.public_key() != subject.public_key) {
    throw Error(ErrorCode::key_mismatch, "root key does not match subject public key");
  }
  auto cert = from_subject(subject, subject.id);
  validate_fields(cert);
  return sign_unchecked(std::move(cert), root_key);
}

Certificate issue_certificate(const Certificate& issuer, const SecretKey& issuer_key,
                              const SubjectFields& subject, Timestamp now) {
  if (issuer_key.public_key() != issuer.public_key) {
    throw Error(ErrorCode::key_mismatch, "issuer key does not match issuer certificate");
  }
  if (!issuer.valid_at(now)) {
    throw Error(ErrorCode::expired_issuer, "issuer '" + issuer.id + "' is outside its validity window");
  }
  if (issuer.node_type == NodeType::AG && subject.node_type != NodeType::AG) {
    throw Error(ErrorCode::type_constraint, "agent '" + issuer.id + "' cannot certify a non-agent");
  }
  if (issuer.constraints.max_depth == 0) {
    throw Error(ErrorCode::depth_exhausted, "issuer '" + issuer.id + "' has max_depth 0");
  }
  if (!constraint_leq(subject.constraints, issuer.constraints)) {
    throw Error(ErrorCode::constraint_violation,
                "constraints of '" + subject.id + "' are not below those of '" + issuer.id + "'");
  }
  if (subject.id == issuer.id) {
    throw Error(ErrorCode::invalid_certificate, "subject id equals issuer id");
  }
  auto cert = from_subject(subject, issuer.id);
  validate_fields(cert);
  return sign_unchecked(std::move(cert), issuer_key);
}

}  // namespace govkit::cert
