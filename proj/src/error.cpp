#include "govkit/error.hpp"

namespace govkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::malformed: return "MALFORMED";
    case ErrorCode::duplicate_entry: return "DUPLICATE_ENTRY";
    case ErrorCode::invalid_certificate: return "INVALID_CERTIFICATE";
    case ErrorCode::type_constraint: return "TYPE_CONSTRAINT";
    case ErrorCode::constraint_violation: return "CONSTRAINT_VIOLATION";
    case ErrorCode::depth_exhausted: return "DEPTH_EXHAUSTED";
    case ErrorCode::expired_issuer: return "EXPIRED_ISSUER";
    case ErrorCode::key_mismatch: return "KEY_MISMATCH";
    case ErrorCode::unsupported_backend: return "UNSUPPORTED_BACKEND";
    case ErrorCode::signing_failure: return "SIGNING_FAILURE";
    case ErrorCode::storage_failure: return "STORAGE_FAILURE";
    case ErrorCode::input_commitment_mismatch: return "INPUT_COMMITMENT_MISMATCH";
    case ErrorCode::missing_disclosure: return "MISSING_DISCLOSURE";
    case ErrorCode::domain_error: return "DOMAIN_ERROR";
    case ErrorCode::length_mismatch: return "LENGTH_MISMATCH";
    case ErrorCode::not_trust_anchor: return "NOT_TRUST_ANCHOR";
    case ErrorCode::single_class: return "SINGLE_CLASS";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace govkit
