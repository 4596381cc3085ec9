#pragma once

#include <ostream>

namespace awls::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kSolverLimit = 2 };

/// Parses argv, runs one subcommand, writes artifacts and manifest.json.
/// Summaries go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace awls::cli
