#pragma once

#include <string>
#include <vector>

namespace boxrel::cli {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // argument / regime errors
inline constexpr int kExitNumerical = 3;  // non-convergence, bracket or sink failure

// Dispatches one invocation (args excludes the program name). Data rows go
// to --out (default standard output); diagnostics go to the error channel.
int run_cli(const std::vector<std::string>& args);

// Convenience overload for main().
int run_cli(int argc, const char* const* argv);

}  // namespace boxrel::cli
