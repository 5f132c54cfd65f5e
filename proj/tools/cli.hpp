#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selinf::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  ///< selfcheck failures, no selected model, other runtime errors
  kUsage = 2,
  kNonConvergence = 3,
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selinf::cli
