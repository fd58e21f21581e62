#pragma once

namespace liouville::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kPass = 0, kConfigError = 1, kNumericFailure = 2, kVerificationFailure = 3 };

/// Parses arguments, runs one subcommand and returns its exit code.
int run_cli(int argc, char** argv);

}  // namespace liouville::cli
