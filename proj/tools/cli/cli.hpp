#pragma once

#include <iosfwd>

namespace qtwist::cli {

/// Exit codes of the `qtwist` tool.
enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,  // library error (domain, missing data, I/O, ...)
  kUsageError = 2,    // bad flags or config file
  kCheckFailed = 3,   // an internal check of the command did not pass
};

/// Runs the tool. Data written to output "-" goes to `out`; progress and the
/// one-line JSON failure record go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtwist::cli
