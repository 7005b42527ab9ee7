#ifndef UCD_CLI_HPP
#define UCD_CLI_HPP

#include <iosfwd>

namespace ucd {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_domain = 1, exit_usage = 2 };

/**
 * Entry point of the `ucd` tool. Machine-readable output goes to `out`,
 * diagnostics and logs to stderr.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out);

} // namespace ucd

#endif // UCD_CLI_HPP
