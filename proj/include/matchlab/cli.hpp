// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace matchlab {

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // the verdict the command tests for did not hold
inline constexpr int kExitUsage = 2;     // bad arguments, unreadable or invalid files
inline constexpr int kExitCap = 3;       // an audit would exceed the evaluation cap

/// `args` excludes the program name. Never throws for user errors; they map
/// to kExitUsage with a message on `err`.
CommandResult run_command(const std::vector<std::string>& args);

}  // namespace matchlab
