// Three-branch HJB residuals of the closed-form solutions on 500-point grids.
#include "divctl/dividends.hpp"
#include "divctl/injections.hpp"
#include "oracles.hpp"

namespace {

void judge(oracle::Report& report, const std::string& name, const divctl::ResidualReport& r, bool upper) {
  report.check(r.max_equality < 1e-6, name + oracle::fmt(": max |(L-delta)V| on (0,b] = %.3g", r.max_equality));
  const double ineq = std::max({r.max_generator_excess, r.max_lower_slope, upper ? r.max_upper_slope : 0.0,
                                r.max_above_slope});
  report.check(ineq <= 1e-8, name + oracle::fmt(": worst inequality-branch violation = %.3g", ineq));
  double fit = r.smooth_fit_first;
  if (!std::isnan(r.smooth_fit_second)) fit = std::max(fit, r.smooth_fit_second);
  report.check(fit < 1e-6, name + oracle::fmt(": smooth-fit mismatch at the barrier = %.3g (b = %.8g)", fit, r.barrier));
  report.check(r.boundary_error < 1e-6, name + oracle::fmt(": boundary condition error = %.3g", r.boundary_error));
}

std::vector<double> grid_for(double barrier) { return divctl::default_grid(2.0 * std::max(barrier, 1.0), 500); }

}  // namespace

int main() {
  oracle::Report report(5);

  struct LevyCase {
    std::string name;
    divctl::ModelParams model;
  };
  std::vector<LevyCase> levy = {{"scale Exp(1) sigma=0.2", oracle::scale_model(0.2)},
                                {"scale Exp(1) sigma=0", oracle::scale_model(0.0)}};
  auto hyper = oracle::scale_model(0.5);
  hyper.jump = divctl::JumpLaw::hyper_exponential({0.3, 0.7}, {0.4, 2.5});
  levy.push_back({"scale HyperExp sigma=0.5", hyper});
  auto erl = oracle::scale_model(0.3);
  erl.jump = divctl::JumpLaw::erlang(2, 2.0);
  levy.push_back({"scale Erlang(2,2) sigma=0.3", erl});

  for (const auto& c : levy) {
    const auto costs = oracle::costs(1.0, 1.2);
    const auto d = divctl::solve_dividends(c.model, costs);
    report.check(d.regime == divctl::Regime::ScaleForm, c.name + ": dividends regime ScaleForm");
    judge(report, c.name + " dividends", divctl::hjb_residual_dividends(d, c.model, costs, grid_for(d.b_star)), false);
    for (double beta : {1.1, 1.5}) {
      const auto ic = oracle::costs(1.0, beta);
      const auto s = divctl::solve_injections(c.model, ic);
      judge(report, c.name + oracle::fmt(" injections beta=%.1f", beta),
            divctl::hjb_residual_injections(s, c.model, ic, grid_for(s.B_star)), true);
    }
  }

  const auto km = oracle::kummer_model();
  const auto kc = oracle::costs(1.0, 1.2);
  const auto kd = divctl::solve_dividends(km, kc);
  report.check(kd.regime == divctl::Regime::KummerForm, "Kummer dividends regime KummerForm");
  judge(report, "Kummer dividends", divctl::hjb_residual_dividends(kd, km, kc, grid_for(kd.b_star)), false);
  const auto ki = divctl::solve_injections(km, kc);
  report.check(ki.regime == divctl::Regime::KummerForm, "Kummer injections regime KummerForm");
  judge(report, "Kummer injections beta=1.2", divctl::hjb_residual_injections(ki, km, kc, grid_for(ki.B_star)), true);

  return report.finish(60.0);
}
