#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ultraheat/config.hpp"

namespace ultraheat {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_usage = 2 };

/// Subcommands: kernel, verify, spectral, noise-test, simulate, moments.
bool is_command(const std::string& name);

/// Runs one subcommand, writing its outputs and manifest.json under
/// config.output. Messages go to log.
int run(const RunConfig& config, std::ostream& log);

/// %.17g formatting used for every float in CSV output.
std::string format_double(double v);

} // namespace ultraheat
