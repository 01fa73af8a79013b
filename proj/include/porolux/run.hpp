#pragma once

#include <string>
#include <vector>

#include "porolux/config.hpp"

namespace porolux {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_solver_failure = 1, exit_config_error = 2 };

struct RunOutcome {
    int exit_code = exit_ok;
    std::vector<std::string> artifacts;  // file names inside the output directory
    std::string error;
};

/// Runs the configured mode and writes artifacts plus manifest.json into
/// config.output_dir. Solver failures keep what was written and mark the
/// manifest FAILED.
RunOutcome run(const RunConfig& config, const std::string& config_text);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Names of the corrected closed-form variants, recorded with every run.
std::string formula_tag();

}  // namespace porolux
