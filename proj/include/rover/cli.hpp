#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rover {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitDivergence = 4;

/// Entry point of the `rover` tool. `args` excludes the program name. Machine
/// output goes to `out` as JSON, the human summary to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rover
