#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmprm::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kNoSolution = 2,
  kValidationFailure = 3,
  kFormatError = 4,
};

// Runs the command line (args excludes the program name). Normal output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmprm::cli
