#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zsl {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

/// Runs `zsl <subcommand> --config PATH [--override key=value]...`.
/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zsl
