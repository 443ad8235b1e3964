#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace govkit {

enum class ErrorCode {
  invalid_argument,
  malformed,
  duplicate_entry,
  invalid_certificate,
  type_constraint,
  constraint_violation,
  depth_exhausted,
  expired_issuer,
  key_mismatch,
  unsupported_backend,
  signing_failure,
  storage_failure,
  input_commitment_mismatch,
  missing_disclosure,
  domain_error,
  length_mismatch,
  not_trust_anchor,
  single_class,
};

std::string_view to_string(ErrorCode code);

// Raised for contract violations. Governance outcomes (DENY, audit failures)
// are returned as values, never thrown.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace govkit
