#pragma once

#include <iosfwd>
#include <string>

#include "bipdo/run_config.hpp"

namespace bipdo {

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitConfig = 2 };

/// Version and compiler; stable for a given build.
std::string build_id();

/// Runs the configured experiment, writes <output_dir>/<name>.json and .csv,
/// prints one verdict line to `out`. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses then runs; config errors give kExitConfig.
int run_file(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace bipdo
