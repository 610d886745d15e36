#pragma once

#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace ellqg::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kInvariantFailed = 1, kConfigError = 2, kNonConvergence = 3 };

struct CommandResult {
  int exit_code = kOk;
  json report;
};

CommandResult cmd_check(const RunConfig& cfg);
CommandResult cmd_bethe(const RunConfig& cfg);
CommandResult cmd_qlame(const RunConfig& cfg);
CommandResult cmd_irf(const RunConfig& cfg);
CommandResult cmd_vertex8(const RunConfig& cfg);

/// Parses argv, runs the subcommand and writes the JSON report to --out or `out`.
/// Diagnostics go to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ellqg::cli
