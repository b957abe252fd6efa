#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blowup {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

/// Runs one command line (without the program name). Output files go under --out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blowup
