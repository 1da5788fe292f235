#pragma once

#include "cli/config.hpp"

#include <string>

namespace gcf::cli {

/// Exit-code contract: 0 success, 1 config error, 2 mathematical failure
/// (divergence / inadmissibility / infeasibility), 3 inconclusive.
enum ExitCode { kOk = 0, kConfigError = 1, kMathFailure = 2, kInconclusive = 3 };

struct RunContext {
    Config cfg;
    std::string out_dir;
};

int cmd_admissibility(const RunContext& ctx);
int cmd_spectrum(const RunContext& ctx);
int cmd_pressure(const RunContext& ctx);
int cmd_sweep(const RunContext& ctx);
int cmd_grandstats(const RunContext& ctx);
int cmd_maxent(const RunContext& ctx);

/// Dispatches a subcommand by name; unknown names raise ConfigError.
int run_command(const std::string& command, const RunContext& ctx);

} // namespace gcf::cli
