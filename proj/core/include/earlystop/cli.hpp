#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace earlystop {

/// Runs one CLI invocation. `args` excludes the program name, e.g.
/// {"calibrate", "--mode", "marginal", ...}. Diagnostics go to `err`,
/// human-readable results to `out`. Returns the process exit status; on any
/// failure no partial output file is left behind.
///
/// Subcommands: calibrate, evaluate, simulate, mc-validate.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace earlystop
