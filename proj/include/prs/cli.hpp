#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prs::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNumericalFailure = 2 };

/// Entry point of the command-line driver; `args` excludes the program name.
/// Subcommands: profile | mesh | solve | convergence | noflow.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prs::cli
