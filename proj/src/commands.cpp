#include "divctl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "divctl/combined.hpp"
#include "divctl/dividends.hpp"
#include "divctl/errors.hpp"
#include "divctl/hjb.hpp"
#include "divctl/injections.hpp"

namespace divctl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a command needs from one solve, independent of the problem.
struct Solved {
  Regime regime = Regime::Degenerate;
  double barrier = 0.0;
  bool inject = false;
  ValueFunction value;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> diagnostics;
  std::optional<DividendSolution> dividends;
  std::optional<InjectionSolution> injections;
  std::optional<CombinedSolution> combined;

  bool closed_form() const { return regime != Regime::MonteCarlo; }
};

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions opts;
  opts.sim.seed = c.sim.seed;
  opts.sim.threads = c.sim.threads;
  opts.sim.antithetic = c.sim.antithetic;
  return opts;
}

void add_coefficients(Solved& s, const Coefficients& coefs, const std::string& prefix = "") {
  for (const auto& [name, v] : coefs) s.summary.push_back({prefix + name, format_number(v)});
}

Solved solve_problem(const RunConfig& c) {
  const auto opts = solve_options(c);
  Solved s;
  s.summary.push_back({"problem", c.problem});
  if (c.problem == "dividends") {
    auto sol = solve_dividends(c.model, c.costs, opts);
    s.regime = sol.regime;
    s.barrier = sol.b_star;
    s.value = sol.value;
    s.summary.push_back({"regime", std::string(to_string(sol.regime))});
    s.summary.push_back({"b_star", format_number(sol.b_star)});
    add_coefficients(s, sol.coefficients);
    s.diagnostics = sol.diagnostics;
    s.dividends = std::move(sol);
  } else if (c.problem == "injections") {
    auto sol = solve_injections(c.model, c.costs, opts);
    s.regime = sol.regime;
    s.barrier = sol.B_star;
    s.inject = true;
    s.value = sol.value;
    s.summary.push_back({"regime", std::string(to_string(sol.regime))});
    s.summary.push_back({"B_star", format_number(sol.B_star)});
    add_coefficients(s, sol.coefficients);
    s.diagnostics = sol.diagnostics;
    s.injections = std::move(sol);
  } else {
    auto sol = solve_combined(c.model, c.costs, opts);
    const bool inj = sol.chosen == Branch::WithInjections;
    s.regime = inj ? sol.injection_sol.regime : sol.dividend_sol.regime;
    s.barrier = inj ? sol.injection_sol.B_star : sol.dividend_sol.b_star;
    s.inject = inj;
    s.value = sol.value();
    s.summary.push_back({"regime", std::string(to_string(s.regime))});
    s.summary.push_back({"chosen", std::string(to_string(sol.chosen))});
    s.summary.push_back({"v_prime_at_zero", format_number(sol.criteria.v_prime_at_zero)});
    s.summary.push_back({"h_at_zero", format_number(sol.criteria.h_at_zero)});
    s.summary.push_back({"dividends.regime", std::string(to_string(sol.dividend_sol.regime))});
    s.summary.push_back({"b_star", format_number(sol.dividend_sol.b_star)});
    s.summary.push_back({"injections.regime", std::string(to_string(sol.injection_sol.regime))});
    s.summary.push_back({"B_star", format_number(sol.injection_sol.B_star)});
    add_coefficients(s, sol.dividend_sol.coefficients, "dividends.");
    add_coefficients(s, sol.injection_sol.coefficients, "injections.");
    for (const auto& d : sol.dividend_sol.diagnostics) s.diagnostics.push_back("dividends: " + d);
    for (const auto& d : sol.injection_sol.diagnostics) s.diagnostics.push_back("injections: " + d);
    for (const auto& d : sol.diagnostics) s.diagnostics.push_back(d);
    s.combined = std::move(sol);
  }
  for (const auto& d : validate(c.model, c.costs))
    if (d.severity == Severity::Warning) s.diagnostics.push_back("warning: " + d.field + ": " + d.message);
  return s;
}

std::vector<double> table_grid(const RunConfig& c, double barrier) {
  const double lo = c.grid.min;
  const double hi = c.grid.max > c.grid.min ? c.grid.max : std::max(lo + 1.0, 2.0 * barrier);
  if (c.grid.points == 1) return {lo};
  std::vector<double> g;
  for (int i = 0; i < c.grid.points; ++i) g.push_back(lo + (hi - lo) * i / (c.grid.points - 1));
  return g;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "output: cannot write '" + path + "'");
  return f;
}

// Runs a command body and maps errors to exit codes.
int guarded(const char* name, std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << name << ": " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kConfigFailure : kSolverFailure;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << "\n";
    return kSolverFailure;
  }
}

// Closed-form value of an arbitrary barrier strategy, if the regime has one.
std::optional<ValueFunction> closed_form_for(const ModelParams& model, const CostParams& costs,
                                             const Strategy& strategy) {
  try {
    return strategy.inject ? injection_value_for_barrier(model, costs, strategy.barrier)
                           : dividend_value_for_barrier(model, costs, strategy.barrier);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RegimeMismatch) return std::nullopt;
    throw;
  }
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("solve", err, [&] {
    const Solved s = solve_problem(config);
    for (const auto& [k, v] : s.summary) out << k << "=" << v << "\n";
    for (const auto& d : s.diagnostics) out << "diagnostic: " << d << "\n";

    const auto grid = table_grid(config, s.barrier);
    auto csv = open_output(config.prefix + "_value.csv");
    csv << "x,value,value_prime,hjb_residual\n";
    nlohmann::json table = nlohmann::json::array();
    for (double x : grid) {
      double res = kNaN;
      if (s.closed_form()) {
        try {
          res = generator_residual(config.model, config.costs, s.value, x);
        } catch (const Error&) {
        }
      }
      const double v = s.value(x), vp = s.value.derivative(x);
      csv << format_number(x) << "," << format_number(v) << "," << format_number(vp) << "," << format_number(res)
          << "\n";
      table.push_back({x, v, vp, std::isnan(res) ? nlohmann::json() : nlohmann::json(res)});
    }
    out << "wrote " << config.prefix << "_value.csv\n";

    if (config.format == "json") {
      nlohmann::json j;
      for (const auto& [k, v] : s.summary) j["summary"][k] = v;
      j["diagnostics"] = s.diagnostics;
      j["columns"] = {"x", "value", "value_prime", "hjb_residual"};
      j["table"] = table;
      auto f = open_output(config.prefix + "_summary.json");
      f << j.dump(2) << "\n";
      out << "wrote " << config.prefix << "_summary.json\n";
    }
    return int(kOk);
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("simulate", err, [&] {
    Strategy strategy;
    if (config.sim_barrier && config.sim_inject) {
      strategy = {*config.sim_barrier, *config.sim_inject};
    } else {
      const Solved s = solve_problem(config);
      strategy.barrier = config.sim_barrier.value_or(s.barrier);
      strategy.inject = config.sim_inject.value_or(s.inject);
    }
    const auto x0s = config.sim_x0.empty() ? table_grid(config, strategy.barrier) : config.sim_x0;
    const auto closed = closed_form_for(config.model, config.costs, strategy);

    out << "strategy: barrier=" << format_number(strategy.barrier) << " inject=" << (strategy.inject ? "true" : "false")
        << "\n";
    const auto outcomes = simulate_paths(config.model, config.costs, strategy, x0s, config.sim);

    auto csv = open_output(config.prefix + "_simulate.csv");
    csv << "x0,mean,std_err,n_paths,truncation_bound,closed_form,check\n";
    bool all_pass = true;
    for (std::size_t i = 0; i < x0s.size(); ++i) {
      const Estimate e = summarize(outcomes[i], config.model, config.costs, strategy, config.sim);
      std::string cf = "", check = "NA";
      if (closed) {
        const double v = (*closed)(x0s[i]);
        const bool pass = std::abs(e.mean - v) <= 3.0 * e.std_err + 1e-9 * std::max(1.0, std::abs(v));
        all_pass = all_pass && pass;
        cf = format_number(v);
        check = pass ? "PASS" : "FAIL";
      }
      const std::string row = format_number(x0s[i]) + "," + format_number(e.mean) + "," + format_number(e.std_err) +
                              "," + std::to_string(e.n) + "," + format_number(e.truncation_bound) + "," + cf + "," +
                              check;
      csv << row << "\n";
      out << row << "\n";
    }
    out << "wrote " << config.prefix << "_simulate.csv\n";
    if (closed && !all_pass) out << "note: some rows differ from the closed form by more than 3 std_err\n";

    if (config.write_paths) {
      auto paths = open_output(config.prefix + "_paths.csv");
      paths << "x0,path_id,ruin_time,disc_dividends,disc_injections,payoff\n";
      for (std::size_t i = 0; i < x0s.size(); ++i)
        for (std::size_t k = 0; k < outcomes[i].size(); ++k) {
          const auto& o = outcomes[i][k];
          paths << format_number(x0s[i]) << "," << k << "," << format_number(o.ruin_time) << ","
                << format_number(o.discounted_dividends) << "," << format_number(o.discounted_injections) << ","
                << format_number(o.payoff) << "\n";
        }
      out << "wrote " << config.prefix << "_paths.csv\n";
    }
    return int(kOk);
  });
}

namespace {

struct VerifyTable {
  std::vector<CheckRow> rows;

  void add(std::string name, double value, double tol, bool pass) { rows.push_back({std::move(name), value, tol, pass}); }
  void upto(std::string name, double value, double tol) { add(std::move(name), value, tol, std::abs(value) <= tol); }
  void append(const std::vector<CheckRow>& more, const std::string& prefix = "") {
    for (auto r : more) {
      r.name = prefix + r.name;
      rows.push_back(std::move(r));
    }
  }
};

// V' nonincreasing and V nondecreasing on the grid.
void shape_rows(VerifyTable& t, const ValueFunction& v, const std::vector<double>& grid, const std::string& prefix) {
  double concave = 0.0, monotone = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    concave = std::max(concave, v.derivative(grid[i]) - v.derivative(grid[i - 1]));
    monotone = std::max(monotone, v(grid[i - 1]) - v(grid[i]));
  }
  t.add(prefix + "concavity max increase of V'", concave, 1e-8, concave <= 1e-8);
  t.add(prefix + "monotonicity max decrease of V", monotone, 1e-8, monotone <= 1e-8);
}

void scale_rows(VerifyTable& t, const ScaleSet& s) {
  const double phi = s.phi();
  const double h = 1e-6 * std::max(1.0, phi);
  const double slope = (s.psi(phi + h) - s.psi(phi - h)) / (2.0 * h);
  const double amplitude = 2.0 * (s.W(0.0) + 1.0 / slope) + 1.0;
  double worst = 0.0;
  for (double gap : {0.5, 1.0, 5.0}) {
    const double theta = phi + gap;
    const double lhs = integrate_exp_tail([&](double x) { return std::exp(-theta * x) * s.W(x); }, 0.0, gap,
                                          amplitude, Tolerance{1e-14, 1e-12, 15});
    const double rhs = 1.0 / (s.psi(theta) - s.delta());
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  t.upto("scale Laplace identity (relative)", worst, 1e-6);
  double inv = 0.0;
  for (double x : {0.5, 1.0, 2.0}) inv = std::max(inv, std::abs(s.W(x) - s.W_by_inversion(x)) / std::abs(s.W(x)));
  t.upto("scale W vs Talbot inversion (relative)", inv, 1e-6);
  const double w0 = s.model().sigma_p > 0.0 ? 0.0 : 1.0 / s.model().p;
  t.upto("scale W(0)", s.W(0.0) - w0, 1e-10);
}

void kummer_rows(VerifyTable& t, const ModelParams& model, const CostParams& costs, const ValueFunction& v) {
  t.upto("Kummer M(1,1,1) - e", kummer_M(1.0, 1.0, 1.0) - std::exp(1.0), 1e-12);
  const double b = v.barrier();
  const double mu = std::get<ExponentialJumps>(model.jump.variant()).rate;
  const double closure = costs.delta * v(b) - (model.r * b - model.p) * v.derivative(b) - model.lambda * costs.alpha / mu;
  t.upto("Kummer closure at barrier", closure / std::max(1.0, std::abs(v(b))), 1e-8);
}

// The barrier moved by +0.1 must fail the HJB battery.
void negative_control(VerifyTable& t, const ModelParams& model, const CostParams& costs, double barrier, bool inject,
                      const std::vector<double>& grid) {
  const double moved = barrier + 0.1;
  const auto v = inject ? injection_value_for_barrier(model, costs, moved) : dividend_value_for_barrier(model, costs, moved);
  const auto r = hjb_residual(model, costs, v, grid, inject ? Boundary::InjectionSlope : Boundary::ZeroValue,
                              inject ? std::optional<double>(costs.beta) : std::nullopt);
  t.add("negative control: barrier+0.1 fails HJB", r.hjb_max, 1e-8, !r.passed());
}

std::vector<double> verify_grid(const RunConfig& c, double barrier) {
  const double hi = c.grid.max > c.grid.min ? c.grid.max : 2.0 * std::max(barrier, 1.0);
  return default_grid(hi, std::max(c.grid.points, 500));
}

}  // namespace

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("verify", err, [&] {
    const Solved s = solve_problem(config);
    const auto& model = config.model;
    const auto& costs = config.costs;
    VerifyTable t;
    t.add("closed form available", s.closed_form() ? 1.0 : 0.0, 1.0, s.closed_form());
    const auto grid = verify_grid(config, s.barrier);

    if (s.closed_form()) {
      if (s.dividends) {
        const auto& d = *s.dividends;
        t.append(residual_rows(hjb_residual_dividends(d, model, costs, grid), false));
        shape_rows(t, d.value, grid, "");
        if (d.scale) scale_rows(t, *d.scale);
        if (d.regime == Regime::KummerForm) kummer_rows(t, model, costs, d.value);
        if (d.regime == Regime::Degenerate) t.upto("degenerate b_star", d.b_star, 0.0);
        if (d.b_star > 0.0) negative_control(t, model, costs, d.b_star, false, grid);
      } else if (s.injections) {
        const auto& inj = *s.injections;
        t.append(residual_rows(hjb_residual_injections(inj, model, costs, grid), true));
        shape_rows(t, inj.value, grid, "");
        t.upto("H'(0) - beta", inj.value.derivative(0.0) - costs.beta, 1e-6);
        t.upto("H'(B*) - alpha", inj.value.derivative(inj.B_star) - costs.alpha, 1e-6);
        if (inj.scale) {
          scale_rows(t, *inj.scale);
          t.upto("Z(B*) - beta/alpha", inj.scale->Z(inj.B_star) - costs.beta / costs.alpha, 1e-8);
        }
        if (inj.regime == Regime::KummerForm) {
          kummer_rows(t, model, costs, inj.value);
          if (inj.B_star > 0.0) {
            const auto sys = kummer_boundary_system(model, costs, inj.B_star);
            t.upto("Delta system: slope at 0 - beta", sys.slope_at_zero - costs.beta, 1e-8);
            t.upto("Delta system: slope at B* - alpha", sys.slope_at_barrier - costs.alpha, 1e-8);
            t.add("Delta system condition number", sys.condition, 1e12, sys.condition < 1e12);
            t.add("single crossing of H_B'(B-) = alpha", inj.crossings, 1.0, inj.crossings == 1);
          }
        }
        if (inj.B_star > 0.0) negative_control(t, model, costs, inj.B_star, true, grid);
      } else {
        const auto& c = *s.combined;
        const bool consistent =
            (c.chosen == Branch::DividendsOnly && c.criteria.v_prime_at_zero <= costs.beta + 1e-10) ||
            (c.chosen == Branch::WithInjections && c.criteria.h_at_zero >= -1e-10);
        t.add("selection rule consistent",
              c.chosen == Branch::WithInjections ? c.criteria.h_at_zero : c.criteria.v_prime_at_zero - costs.beta,
              1e-10, consistent);
        if (c.chosen != Branch::Undetermined) {
          const auto cr = hjb_residual_combined(c, model, costs, grid);
          t.append(residual_rows(cr.report, true), "combined: ");
          t.upto("combined boundary max{-v(0), v'(0) - beta}", cr.boundary, 1e-6);
          shape_rows(t, c.value(), grid, "combined: ");
          const bool other_closed = (c.chosen == Branch::WithInjections ? c.dividend_sol.regime
                                                                        : c.injection_sol.regime) != Regime::MonteCarlo;
          if (other_closed) {
            const auto dom = dominance_check(c, default_grid(grid.back(), 200));
            t.add("dominance of chosen branch", dom.worst_gap, 1e-8, dom.passed);
          }
        }
      }
    }

    auto csv = open_output(config.prefix + "_verify.csv");
    csv << "check,value,tolerance,status\n";
    bool all = true;
    std::size_t width = 5;
    for (const auto& r : t.rows) width = std::max(width, r.name.size());
    for (const auto& r : t.rows) {
      all = all && r.pass;
      csv << "\"" << r.name << "\"," << format_number(r.value) << "," << format_number(r.tolerance) << ","
          << (r.pass ? "PASS" : "FAIL") << "\n";
      out << r.name << std::string(width + 2 - r.name.size(), ' ') << (r.pass ? "PASS  " : "FAIL  ")
          << format_number(r.value) << " (tol " << format_number(r.tolerance) << ")\n";
    }
    out << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? int(kOk) : int(kCheckFailed);
  });
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::string> keys = {
      {"alpha", "costs.alpha"}, {"beta", "costs.beta"}, {"delta", "costs.delta"}, {"lambda", "model.lambda"},
      {"p", "model.p"},         {"sigma_p", "model.sigma_p"}, {"r", "model.r"}};
  const auto it = keys.find(config.sweep_param);
  if (it == keys.end()) {
    err << "sweep: ConfigError: sweep.param: unknown parameter '" << config.sweep_param
        << "' (alpha, beta, delta, lambda, p, sigma_p, r)\n";
    return kConfigFailure;
  }
  if (config.sweep_values.empty()) {
    err << "sweep: ConfigError: sweep.values: no values given\n";
    return kConfigFailure;
  }
  return guarded("sweep", err, [&] {
    std::vector<RunConfig> runs;
    for (double v : config.sweep_values) runs.push_back(with_value(config, it->second, format_number(v)));

    auto csv = open_output(config.prefix + "_sweep.csv");
    const std::string header = config.sweep_param + ",regime,b_star,B_star,value_x0,chosen";
    csv << header << "\n";
    out << header << "\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const Solved s = solve_problem(runs[i]);
      std::string b_star, B_star, chosen;
      if (s.dividends) b_star = format_number(s.dividends->b_star);
      if (s.injections) B_star = format_number(s.injections->B_star);
      if (s.combined) {
        b_star = format_number(s.combined->dividend_sol.b_star);
        B_star = format_number(s.combined->injection_sol.B_star);
        chosen = std::string(to_string(s.combined->chosen));
      }
      const std::string row = format_number(config.sweep_values[i]) + "," + std::string(to_string(s.regime)) + "," +
                              b_star + "," + B_star + "," + format_number(s.value(config.sweep_x0)) + "," + chosen;
      csv << row << "\n";
      out << row << "\n";
    }
    out << "wrote " << config.prefix << "_sweep.csv\n";
    return int(kOk);
  });
}

}  // namespace divctl
