#pragma once

#include <string>

#include "ep/config.hpp"

namespace ep {

// Runs one CLI subcommand (background | sonic | solve | check3d | residual |
// sweep) with all file outputs under outdir, which is created if absent.
// Returns 0 on success and throws solver_error on failure; the CLI maps
// config_error to exit code 2 and every other solver error to 3.
int run_command(const std::string& command, const RunConfig& cfg, const std::string& outdir);

// Worker threads available to concurrent commands: EP_ANNULUS_THREADS when
// set to a positive integer, hardware concurrency otherwise.
int thread_cap();

} // namespace ep
