// divctl: optimal dividends and capital injections for the dual jump-diffusion model.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divctl/commands.hpp"
#include "divctl/config.hpp"
#include "divctl/errors.hpp"

namespace {

// MIN:MAX:N
void apply_grid(divctl::RunConfig& c, const std::string& spec) {
  double lo = 0, hi = 0;
  int n = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &tail) != 3)
    throw divctl::Error(divctl::ErrorCode::ConfigError, "--grid: expected MIN:MAX:N, got '" + spec + "'");
  c = divctl::with_value(c, "output.grid.min", std::to_string(lo));
  c = divctl::with_value(c, "output.grid.max", std::to_string(hi));
  c = divctl::with_value(c, "output.grid.points", std::to_string(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal dividend and capital-injection barriers for the dual jump-diffusion model"};
  app.require_subcommand(0, 1);

  std::string config_path, out_prefix, problem, grid, param, values;
  std::vector<std::string> sets;
  bool dump = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_prefix, "output path prefix");
  app.add_option("--problem", problem, "dividends | injections | combined");
  app.add_option("--grid", grid, "output grid MIN:MAX:N");
  app.add_option("--set", sets, "override one key, e.g. --set costs.beta=1.2");
  app.add_option("--param", param, "sweep parameter (alpha, beta, delta, lambda, p, sigma_p, r)");
  app.add_option("--values", values, "comma-separated sweep values");
  app.add_flag("--dump-config", dump, "print the effective config and exit");

  auto* solve = app.add_subcommand("solve", "optimal barrier(s), value table and summary");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of a barrier strategy");
  auto* verify = app.add_subcommand("verify", "HJB residuals and identity checks");
  auto* sweep = app.add_subcommand("sweep", "re-solve over a parameter grid");
  for (auto* sub : {solve, simulate, verify, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return divctl::kConfigFailure;
  }

  divctl::RunConfig config;
  try {
    config = divctl::load_config(config_path);
    if (!problem.empty()) config = divctl::with_value(config, "problem", problem);
    if (!out_prefix.empty()) config = divctl::with_value(config, "output.prefix", out_prefix);
    if (!grid.empty()) apply_grid(config, grid);
    if (!param.empty()) config = divctl::with_value(config, "sweep.param", param);
    if (!values.empty()) config = divctl::with_value(config, "sweep.values", values);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw divctl::Error(divctl::ErrorCode::ConfigError, "--set: expected key=value, got '" + kv + "'");
      config = divctl::with_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const divctl::Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return divctl::kConfigFailure;
  }

  if (dump) {
    std::cout << divctl::dump_config(config);
    return divctl::kOk;
  }
  if (*solve) return divctl::cmd_solve(config, std::cout, std::cerr);
  if (*simulate) return divctl::cmd_simulate(config, std::cout, std::cerr);
  if (*verify) return divctl::cmd_verify(config, std::cout, std::cerr);
  if (*sweep) return divctl::cmd_sweep(config, std::cout, std::cerr);
  std::cerr << app.help();
  return divctl::kConfigFailure;
}
