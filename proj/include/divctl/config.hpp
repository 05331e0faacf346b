#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divctl/model.hpp"
#include "divctl/simulate.hpp"

namespace divctl {

struct GridSpec {
  double min = 0.0;
  /// ≤ min selects twice the solved barrier (at least 1).
  double max = 0.0;
  int points = 101;
};

/// Everything one CLI run needs, parsed from a flat `dotted.key = value` document.
struct RunConfig {
  ModelParams model;
  CostParams costs;
  std::string problem = "dividends";

  SimConfig sim;
  /// Strategy for `simulate`; defaults to the solved barrier and the problem's injection rule.
  std::optional<double> sim_barrier;
  std::optional<bool> sim_inject;
  /// Starting points for `simulate`; empty uses the output grid.
  std::vector<double> sim_x0;

  std::string format = "csv";
  GridSpec grid;
  std::string prefix = "divctl";
  bool write_paths = false;

  std::string sweep_param;
  std::vector<double> sweep_values;
  double sweep_x0 = 1.0;
};

/// Every accepted key, in dump order.
const std::vector<std::string>& config_keys();

/// DIVCTL_ + upper-cased key with dots replaced by underscores.
std::string env_name(std::string_view key);

/// Key/value pairs of a document. Throws ConfigError naming the line or key.
std::map<std::string, std::string> parse_pairs(std::string_view text);

/// Reads DIVCTL_* overrides for every known key from the environment.
std::map<std::string, std::string> environment_overrides();

/// Builds and validates a RunConfig. Errors name the offending key.
RunConfig build_config(const std::map<std::string, std::string>& pairs);

/// File contents (may be empty) plus environment overrides.
RunConfig load_config(const std::string& path, bool use_environment = true);

/// Every key with its effective value; re-parses to an identical RunConfig.
std::string dump_config(const RunConfig& config);

/// Sets a single key on an existing config (used by sweeps and CLI flags).
RunConfig with_value(const RunConfig& config, const std::string& key, const std::string& value);

}  // namespace divctl
