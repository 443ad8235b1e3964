#pragma once

// Command surface over the library: files in, JSON (or plain text) out.
//
// Exit codes: 0 success, 1 governance denial or detection, 2 usage, input or
// I/O error. Stdout is a single JSON document exactly when --json is given.
// GOVKIT_HOME, when set, supplies default paths: keys/<id>.json,
// anchors.pem, revocations.jsonl and ledger.bin.

#include <string>
#include <vector>

namespace govkit::cli {

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// `args` excludes the program name. Never throws.
CommandResult dispatch(const std::vector<std::string>& args);

}  // namespace govkit::cli
