#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsvf {

/// Exit codes of the command-line front end.
///   0 — success
///   2 — usage error (unknown command, bad flag, malformed value)
///   3 — input error (unreadable/invalid experiment file)
///   4 — computation error (empty ensemble, invalid physics input)
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitComputation = 4;

/// Runs one CLI invocation. `args` excludes the program name. Normal
/// output goes to `out`, diagnostics to `err`; returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace tsvf
