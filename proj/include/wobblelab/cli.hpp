#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wobblelab {

/// Exit statuses of the command-line tool.
enum ExitStatus : int { kSuccess = 0, kViolation = 1, kUsage = 2 };

/// Runs one command line (without the program name). The artifact goes to
/// `--output` or `out`; diagnostics and the summary line go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wobblelab
