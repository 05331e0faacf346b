#include "divctl/combined.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "divctl/errors.hpp"

namespace divctl {

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::DividendsOnly: return "DividendsOnly";
    case Branch::WithInjections: return "WithInjections";
    case Branch::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

const ValueFunction& CombinedSolution::value() const {
  return chosen == Branch::WithInjections ? injection_sol.value : dividend_sol.value;
}

CombinedSolution solve_combined(const ModelParams& model, const CostParams& costs, const SolveOptions& opts,
                                double tol) {
  CombinedSolution sol;
  sol.dividend_sol = solve_dividends(model, costs, opts);
  sol.injection_sol = solve_injections(model, costs, opts);
  const bool closed_d = sol.dividend_sol.regime != Regime::MonteCarlo;
  const bool closed_i = sol.injection_sol.regime != Regime::MonteCarlo;
  if (closed_d != closed_i)
    sol.diagnostics.push_back("one branch is closed-form and the other Monte Carlo; criteria are not comparable in accuracy");

  sol.criteria.v_prime_at_zero = sol.dividend_sol.value.derivative(0.0);
  sol.criteria.h_at_zero = sol.injection_sol.value(0.0);
  const bool dividends_ok = sol.criteria.v_prime_at_zero <= costs.beta + tol;
  const bool injections_ok = sol.criteria.h_at_zero >= -tol;

  if (dividends_ok && injections_ok) {
    const double hi = 2.0 * std::max({sol.dividend_sol.b_star, sol.injection_sol.B_star, 1.0});
    int d_wins = 0, i_wins = 0;
    for (int k = 0; k <= 200; ++k) {
      const double x = hi * k / 200.0;
      const double vd = sol.dividend_sol.value(x), vi = sol.injection_sol.value(x);
      if (vd > vi) ++d_wins;
      if (vi > vd) ++i_wins;
    }
    sol.chosen = i_wins > d_wins ? Branch::WithInjections : Branch::DividendsOnly;
    std::ostringstream msg;
    msg << "ConditionOverlap: both selection conditions hold; dividends larger at " << d_wins
        << " grid points, injections at " << i_wins;
    sol.diagnostics.push_back(msg.str());
  } else if (dividends_ok) {
    sol.chosen = Branch::DividendsOnly;
  } else if (injections_ok) {
    sol.chosen = Branch::WithInjections;
  } else {
    sol.chosen = Branch::Undetermined;
    sol.diagnostics.push_back("neither selection condition holds: V'(0) > beta and H(0) < 0");
  }
  return sol;
}

bool CombinedResidual::passed(double equality_tol, double inequality_tol) const {
  return report.passed(equality_tol, inequality_tol) && std::abs(boundary) < equality_tol;
}

CombinedResidual hjb_residual_combined(const CombinedSolution& sol, const ModelParams& model, const CostParams& costs,
                                       const std::vector<double>& grid) {
  if (sol.chosen == Branch::Undetermined)
    throw Error(ErrorCode::RegimeMismatch, "no branch selected; HJB check not applicable");
  const ValueFunction& v = sol.value();
  const bool injecting = sol.chosen == Branch::WithInjections;
  if ((injecting ? sol.injection_sol.regime : sol.dividend_sol.regime) == Regime::MonteCarlo)
    throw Error(ErrorCode::RegimeMismatch, "HJB residuals need a closed-form solution");
  CombinedResidual out;
  out.report = hjb_residual(model, costs, v, grid, injecting ? Boundary::InjectionSlope : Boundary::ZeroValue,
                            costs.beta);
  out.boundary = std::max(-v(0.0), v.derivative(0.0) - costs.beta);
  return out;
}

DominanceReport dominance_check(const CombinedSolution& sol, const std::vector<double>& grid, double tol) {
  DominanceReport r;
  const bool injecting = sol.chosen == Branch::WithInjections;
  const ValueFunction& chosen = injecting ? sol.injection_sol.value : sol.dividend_sol.value;
  const ValueFunction& other = injecting ? sol.dividend_sol.value : sol.injection_sol.value;
  r.worst_gap = -std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double c = chosen(x), o = other(x);
    r.worst_gap = std::max(r.worst_gap, o - c);
    if (c < o - tol) r.violations.push_back({x, c, o});
  }
  r.passed = r.violations.empty() && sol.chosen != Branch::Undetermined;
  return r;
}

}  // namespace divctl
