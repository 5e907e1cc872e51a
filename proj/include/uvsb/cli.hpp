#pragma once

#include <string>
#include <vector>

namespace uvsb::cli {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { ok = 0, config_error = 2, solver_error = 3, io_error = 4 };

/// Runs one subcommand.  On failure a one-line JSON error record is written
/// to stderr and the matching ExitCode is returned.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args excludes the program name

}  // namespace uvsb::cli
