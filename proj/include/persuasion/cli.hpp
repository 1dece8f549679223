#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace persuasion::cli {

/// Process exit codes of the `persuade` tool.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,   // bad config file or command line
  kDataError = 3,     // unreadable or malformed input data
  kDivergence = 4,    // training loss became non-finite
  kVocabularyMismatch = 5,
};

/// Runs the tool on `args` (without the program name). Machine-readable
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace persuasion::cli
