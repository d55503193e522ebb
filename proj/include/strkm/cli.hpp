#pragma once

#include <iosfwd>

namespace strkm {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,    // bad arguments, invalid configuration, unreadable files
  kExitParse = 3,    // malformed config, dataset, checkpoint or image
  kExitNumeric = 4,  // NaN loss, singular matrices, broken invariants
};

// Runs one subcommand. Requested data and written paths go to `out`,
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace strkm
