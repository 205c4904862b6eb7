#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spectra::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kInputError = 2, kInternalError = 3 };

/// Parses arguments and runs one subcommand. Human-readable progress goes
/// to `out`, diagnostics to `err`; payload files are written where the
/// flags say (or to `out` when a command has no --out).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectra::cli
