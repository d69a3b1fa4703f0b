#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netdyn {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,          // success, or the checked property holds
  kExitPropertyFails = 1,
  kExitInputError = 2,  // malformed or semantically invalid input
};

/// Runs one CLI invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netdyn
