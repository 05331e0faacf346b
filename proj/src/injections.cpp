#include "divctl/injections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

double jump_rate(const ModelParams& model) { return std::get<ExponentialJumps>(model.jump.variant()).rate; }

// H_B = k1 y1 + k2 y2 with H'(0) = β and the closure at B.
std::pair<double, double> kummer_coefficients(const KummerBasis& basis, const ModelParams& model,
                                              const CostParams& costs, double B) {
  const double mu = jump_rate(model);
  const double drift = model.r * B - model.p;
  Eigen::Matrix2d A;
  A << basis.y1_prime(0.0), basis.y2_prime(0.0), costs.delta * basis.y1(B) - drift * basis.y1_prime(B),
      costs.delta * basis.y2(B) - drift * basis.y2_prime(B);
  const Eigen::Vector2d rhs(costs.beta, model.lambda * costs.alpha / mu);
  const Eigen::Vector2d k = A.fullPivLu().solve(rhs);
  return {k(0), k(1)};
}

InjectionSolution solve_monte_carlo(const ModelParams& model, const CostParams& costs, const SolveOptions& opts,
                                    std::string reason) {
  InjectionSolution sol;
  sol.regime = Regime::MonteCarlo;
  sol.diagnostics.push_back(std::move(reason));
  const double hi =
      opts.mc_hi > 0.0 ? opts.mc_hi : std::clamp(model.lambda * model.jump.mean() / (2.0 * costs.delta), 1.0, 50.0);
  const double x0 = opts.mc_x0 > 0.0 ? opts.mc_x0 : std::min(1.0, hi / 10.0);
  sol.search = search_barrier(model, costs, true, x0, 0.0, hi, opts.sim, opts.mc_grid_points);
  sol.B_star = sol.search->barrier;

  MonteCarloValue mc{costs.alpha, sol.B_star, {}, {}, {}};
  const int n = std::max(opts.mc_value_points, 2);
  for (int i = 0; i < n; ++i) mc.x.push_back(1.5 * sol.B_star * i / (n - 1));
  if (sol.B_star == 0.0) mc.x = {0.0};
  const auto est = estimate_values(model, costs, Strategy{sol.B_star, true}, mc.x, opts.sim);
  for (const auto& e : est) {
    mc.mean.push_back(e.mean);
    mc.std_err.push_back(e.std_err);
  }
  sol.value = ValueFunction(std::move(mc));
  sol.coefficients.push_back({"mc_value_at_x0", sol.search->value});
  sol.coefficients.push_back({"mc_std_err_at_x0", sol.search->std_err});
  return sol;
}

InjectionSolution solve_kummer(const ModelParams& model, const CostParams& costs, const SolveOptions& opts) {
  auto basis = kummer_basis_for(model, costs);
  const double xr = model.p / model.r;
  InjectionSolution sol;
  sol.regime = Regime::KummerForm;

  auto F = [&](double B) {
    const auto [k1, k2] = kummer_coefficients(*basis, model, costs, B);
    return k1 * basis->y1_prime(B) + k2 * basis->y2_prime(B) - costs.alpha;
  };
  if (costs.beta - costs.alpha <= 1e-14 * costs.beta) {
    sol.B_star = 0.0;
  } else {
    const auto roots = scan_roots(F, kummer_scan_grid(xr, opts.scan_points), opts.tol);
    sol.crossings = static_cast<int>(roots.size());
    if (roots.empty())
      return solve_monte_carlo(model, costs, opts, "no injection barrier below the drift root p/r; using Monte Carlo");
    sol.B_star = roots.back();
    if (roots.size() > 1) {
      std::ostringstream msg;
      msg << roots.size() << " crossings of H_B'(B-) = alpha on (0, p/r); the largest is used";
      sol.diagnostics.push_back(msg.str());
    }
  }
  const auto [k1, k2] = kummer_coefficients(*basis, model, costs, sol.B_star);
  sol.value = ValueFunction(KummerValue{basis, costs.alpha, sol.B_star, k1, k2});
  sol.coefficients.push_back({"a", basis->a()});
  sol.coefficients.push_back({"b", basis->b()});
  sol.coefficients.push_back({"k1", k1});
  sol.coefficients.push_back({"k2", k2});
  sol.coefficients.push_back({"barrier_crossings", static_cast<double>(sol.crossings)});

  if (sol.B_star > 0.0) {
    const auto sys = kummer_boundary_system(model, costs, sol.B_star);
    sol.coefficients.push_back({"Delta1", sys.d1});
    sol.coefficients.push_back({"Delta2", sys.d2});
    sol.coefficients.push_back({"Delta3", sys.d3});
    sol.coefficients.push_back({"Delta4", sys.d4});
    sol.coefficients.push_back({"C3", sys.C3});
    sol.coefficients.push_back({"C4", sys.C4});
    sol.coefficients.push_back({"Delta_condition", sys.condition});
    double mismatch = 0.0;
    for (double x : {0.0, 0.5 * sol.B_star, sol.B_star}) {
      const double mu_form = sys.C3 * basis->M(x) + sys.C4 * basis->U(x);
      mismatch = std::max(mismatch, std::abs(mu_form - sol.value(x)) / std::max(1.0, std::abs(sol.value(x))));
    }
    sol.coefficients.push_back({"MU_form_mismatch", mismatch});
    sol.diagnostics.push_back("boundary system rows: (Delta1, Delta2) = (M'(0), U'(0)), (Delta3, Delta4) = (M'(B*), U'(B*))");
  }
  sol.diagnostics.push_back("U on z < 0 is Re U(a, b, z + i0)");
  return sol;
}

}  // namespace

KummerBoundarySystem kummer_boundary_system(const ModelParams& model, const CostParams& costs, double B) {
  auto basis = kummer_basis_for(model, costs);
  KummerBoundarySystem s{};
  s.d1 = basis->M_prime(0.0);
  s.d2 = basis->U_prime(0.0);
  s.d3 = basis->M_prime(B);
  s.d4 = basis->U_prime(B);
  const double det = s.d1 * s.d4 - s.d2 * s.d3;
  s.C3 = (costs.beta * s.d4 - costs.alpha * s.d2) / det;
  s.C4 = (costs.alpha * s.d1 - costs.beta * s.d3) / det;
  Eigen::Matrix2d A;
  A << s.d1, s.d2, s.d3, s.d4;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(A);
  s.condition = svd.singularValues()(0) / svd.singularValues()(1);
  s.slope_at_zero = s.C3 * s.d1 + s.C4 * s.d2;
  s.slope_at_barrier = s.C3 * s.d3 + s.C4 * s.d4;
  return s;
}

InjectionSolution solve_injections(const ModelParams& model, const CostParams& costs, const SolveOptions& opts) {
  require_valid(model, costs);
  if (is_levy_regime(model) && model.jump.has_rational_transform()) {
    auto scale = std::make_shared<const ScaleSet>(ScaleSet::build(model, costs.delta));
    const double c = net_drift(model) / costs.delta;
    InjectionSolution sol;
    sol.regime = Regime::ScaleForm;
    sol.scale = scale;
    sol.B_star = invert_monotone([&](double x) { return scale->Z(x); }, costs.beta / costs.alpha, 0.0, 1.0, opts.tol);
    sol.value = ValueFunction(ScaleValue{scale, costs.alpha, sol.B_star, c, 0.0});
    sol.coefficients.push_back({"Phi(delta)", scale->phi()});
    sol.coefficients.push_back({"E[X1]/delta", c});
    sol.coefficients.push_back({"Z(B*)", scale->Z(sol.B_star)});
    sol.coefficients.push_back({"H(0)", sol.value(0.0)});
    return sol;
  }
  std::string why;
  if (kummer_regime_applies(model, costs, &why)) {
    try {
      return solve_kummer(model, costs, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParameterPole) throw;
      return solve_monte_carlo(model, costs, opts, std::string("Kummer parameters hit a pole: ") + e.what());
    }
  }
  return solve_monte_carlo(model, costs, opts, "no closed form: " + why);
}

ValueFunction injection_value_for_barrier(const ModelParams& model, const CostParams& costs, double B) {
  require_valid(model, costs);
  if (is_levy_regime(model) && model.jump.has_rational_transform()) {
    auto scale = std::make_shared<const ScaleSet>(ScaleSet::build(model, costs.delta));
    return scale_injection_value(scale, costs.alpha, costs.beta, B);
  }
  if (kummer_regime_applies(model, costs)) {
    auto basis = kummer_basis_for(model, costs);
    const auto [k1, k2] = kummer_coefficients(*basis, model, costs, B);
    return ValueFunction(KummerValue{basis, costs.alpha, B, k1, k2});
  }
  throw Error(ErrorCode::RegimeMismatch, "barrier values are closed-form only in the scale and Kummer regimes");
}

ResidualReport hjb_residual_injections(const InjectionSolution& sol, const ModelParams& model,
                                       const CostParams& costs, const std::vector<double>& grid) {
  if (sol.regime == Regime::MonteCarlo)
    throw Error(ErrorCode::RegimeMismatch, "HJB residuals need a closed-form solution");
  return hjb_residual(model, costs, sol.value, grid, Boundary::InjectionSlope, costs.beta);
}

double value_at(const InjectionSolution& sol, double x) { return sol.value(x); }

}  // namespace divctl
