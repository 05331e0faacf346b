#pragma once

#include <iosfwd>
#include <string>

#include "divctl/config.hpp"

namespace divctl {

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigFailure = 2, kSolverFailure = 3 };

/// 12 significant digits; "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Summary to `out`, value table to <prefix>_value.csv (plus <prefix>_summary.json for format = json).
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Monte Carlo estimates at the configured starting points to <prefix>_simulate.csv,
/// with closed-form PASS/FAIL flags when a closed form exists.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Residual and identity battery to <prefix>_verify.csv. Returns 1 when any row fails.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// One solve per value of config.sweep_param to <prefix>_sweep.csv.
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace divctl
