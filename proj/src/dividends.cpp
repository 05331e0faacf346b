#include "divctl/dividends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

constexpr double kKnifeEdge = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// g vanishes at 0; every barrier value is a multiple of it.
struct ZeroAtOrigin {
  std::shared_ptr<const KummerBasis> basis;
  double c1, c2;  // g = c1 y1 + c2 y2

  explicit ZeroAtOrigin(std::shared_ptr<const KummerBasis> b) : basis(std::move(b)) {
    c1 = basis->y2(0.0);
    c2 = -basis->y1(0.0);
  }
  double g(double x) const { return c1 * basis->y1(x) + c2 * basis->y2(x); }
  double gp(double x) const { return c1 * basis->y1_prime(x) + c2 * basis->y2_prime(x); }
};

double jump_rate(const ModelParams& model) { return std::get<ExponentialJumps>(model.jump.variant()).rate; }

// k with δ k g(b) - (rb - p) k g'(b) = λα/μ: the linear part above b closes the equation at b.
double closure_scale(const ZeroAtOrigin& z, const ModelParams& model, const CostParams& costs, double b) {
  const double mu = jump_rate(model);
  const double denom = costs.delta * z.g(b) - (model.r * b - model.p) * z.gp(b);
  return model.lambda * costs.alpha / (mu * denom);
}

void classical_diagnostics(DividendSolution& sol, const ZeroAtOrigin& z, const ModelParams& model,
                           const SolveOptions& opts) {
  const auto& B = *z.basis;
  const double xr = model.p / model.r;
  const double m0 = B.M(0.0), u0 = B.U(0.0);
  // Δ(b) = U(z0) M'(b) - M(z0) U'(b) in the x variable.
  auto Delta = [&](double b) { return u0 * B.M_prime(b) - m0 * B.U_prime(b); };
  const double d_star = Delta(sol.b_star);
  const double C1 = sol.value.alpha() * u0 / d_star;
  const double C2 = -sol.value.alpha() * m0 / d_star;
  sol.coefficients.push_back({"C1", C1});
  sol.coefficients.push_back({"C2", C2});
  sol.coefficients.push_back({"Delta(b*)", d_star});

  double mismatch = 0.0;
  for (double x : {0.25 * sol.b_star, 0.5 * sol.b_star, sol.b_star}) {
    const double mu_form = C1 * B.M(x) + C2 * B.U(x);
    mismatch = std::max(mismatch, std::abs(mu_form - sol.value(x)) / std::max(1.0, std::abs(sol.value(x))));
  }
  sol.coefficients.push_back({"MU_form_mismatch", mismatch});
  if (!(mismatch < 1e-6))
    sol.diagnostics.push_back("{M, U} pair is ill-conditioned here; C1, C2 reproduce V only to " + fmt(mismatch));

  // Local maximisers of 1/|Δ| on the scan grid, the largest one reported.
  // The sign of Δ follows the branch of U and carries no information.
  const auto grid = kummer_scan_grid(xr, opts.scan_points);
  auto inv_abs = [&](double b) { return 1.0 / std::abs(Delta(b)); };
  std::vector<double> inv;
  for (double b : grid) inv.push_back(inv_abs(b));
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (inv[i] > inv[i - 1] && inv[i] >= inv[i + 1] && std::isfinite(inv[i])) {
      maxima.push_back(maximize(inv_abs, grid[i - 1], grid[i + 1]));
    }
  }
  const double argmax = maxima.empty() ? kNaN : *std::max_element(maxima.begin(), maxima.end());
  sol.coefficients.push_back({"argmax_inv_Delta", argmax});
  sol.coefficients.push_back({"argmax_discrepancy", argmax - sol.b_star});
  std::ostringstream msg;
  msg << "b* solves V_b'(b-) = alpha with V(0) = 0 and closure at b; argmax of 1/|Delta(b)| is " << fmt(argmax)
      << " (" << maxima.size() << " local maxima), discrepancy " << fmt(argmax - sol.b_star);
  sol.diagnostics.push_back(msg.str());
  sol.diagnostics.push_back("U on z < 0 is Re U(a, b, z + i0)");
}

DividendSolution solve_monte_carlo(const ModelParams& model, const CostParams& costs, const SolveOptions& opts,
                                   std::string reason) {
  DividendSolution sol;
  sol.regime = Regime::MonteCarlo;
  sol.diagnostics.push_back(std::move(reason));
  const double hi =
      opts.mc_hi > 0.0 ? opts.mc_hi : std::clamp(model.lambda * model.jump.mean() / (2.0 * costs.delta), 1.0, 50.0);
  const double x0 = opts.mc_x0 > 0.0 ? opts.mc_x0 : std::min(1.0, hi / 10.0);
  sol.search = search_barrier(model, costs, false, x0, 0.0, hi, opts.sim, opts.mc_grid_points);
  sol.b_star = sol.search->barrier;

  MonteCarloValue mc{costs.alpha, sol.b_star, {}, {}, {}};
  const int n = std::max(opts.mc_value_points, 2);
  for (int i = 0; i < n; ++i) mc.x.push_back(1.5 * sol.b_star * i / (n - 1));
  if (sol.b_star == 0.0) mc.x = {0.0};
  const auto est = estimate_values(model, costs, Strategy{sol.b_star, false}, mc.x, opts.sim);
  for (const auto& e : est) {
    mc.mean.push_back(e.mean);
    mc.std_err.push_back(e.std_err);
  }
  mc.barrier = sol.b_star;
  sol.value = ValueFunction(std::move(mc));
  sol.coefficients.push_back({"mc_value_at_x0", sol.search->value});
  sol.coefficients.push_back({"mc_std_err_at_x0", sol.search->std_err});
  return sol;
}

DividendSolution solve_kummer(const ModelParams& model, const CostParams& costs, const SolveOptions& opts) {
  const ZeroAtOrigin z(kummer_basis_for(model, costs));
  const double mu = jump_rate(model);
  const double xr = model.p / model.r;
  // Zero of V_b'(b-) - α after clearing the positive closure denominator.
  auto G = [&](double b) { return (model.r * b - model.p + model.lambda / mu) * z.gp(b) - costs.delta * z.g(b); };
  const auto roots = scan_roots(G, kummer_scan_grid(xr, opts.scan_points), opts.tol);
  if (roots.empty())
    return solve_monte_carlo(model, costs, opts, "no dividend barrier below the drift root p/r; using Monte Carlo");

  DividendSolution sol;
  sol.regime = Regime::KummerForm;
  sol.b_star = roots.back();
  const double k = closure_scale(z, model, costs, sol.b_star);
  sol.value = ValueFunction(KummerValue{z.basis, costs.alpha, sol.b_star, k * z.c1, k * z.c2});
  sol.coefficients.push_back({"a", z.basis->a()});
  sol.coefficients.push_back({"b", z.basis->b()});
  sol.coefficients.push_back({"k1", k * z.c1});
  sol.coefficients.push_back({"k2", k * z.c2});
  sol.coefficients.push_back({"barrier_crossings", static_cast<double>(roots.size())});
  if (roots.size() > 1) sol.diagnostics.push_back("several barrier candidates; the largest is used");
  classical_diagnostics(sol, z, model, opts);
  return sol;
}

}  // namespace

DividendSolution solve_dividends(const ModelParams& model, const CostParams& costs, const SolveOptions& opts) {
  require_valid(model, costs);
  const double gap = net_drift(model);
  if (gap <= kKnifeEdge) {
    DividendSolution sol;
    sol.regime = Regime::Degenerate;
    sol.b_star = 0.0;
    sol.value = ValueFunction(LinearValue{costs.alpha});
    sol.diagnostics.push_back("lambda*E[X] <= p: paying everything immediately is optimal");
    return sol;
  }
  if (is_levy_regime(model) && model.jump.has_rational_transform()) {
    auto scale = std::make_shared<const ScaleSet>(ScaleSet::build(model, costs.delta));
    const double c = gap / costs.delta;
    DividendSolution sol;
    sol.regime = Regime::ScaleForm;
    sol.scale = scale;
    sol.b_star = invert_monotone([&](double x) { return scale->Zbar(x); }, c, 0.0, 1.0, opts.tol);
    sol.value = ValueFunction(ScaleValue{scale, costs.alpha, sol.b_star, c, 0.0});
    sol.coefficients.push_back({"Phi(delta)", scale->phi()});
    sol.coefficients.push_back({"E[X1]/delta", c});
    sol.coefficients.push_back({"Zbar(b*)", scale->Zbar(sol.b_star)});
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

ValueFunction dividend_value_for_barrier(const ModelParams& model, const CostParams& costs, double b) {
  require_valid(model, costs);
  if (b <= 0.0) return ValueFunction(LinearValue{costs.alpha});
  if (is_levy_regime(model) && model.jump.has_rational_transform()) {
    auto scale = std::make_shared<const ScaleSet>(ScaleSet::build(model, costs.delta));
    return scale_dividend_value(scale, costs.alpha, b);
  }
  if (kummer_regime_applies(model, costs)) {
    const ZeroAtOrigin z(kummer_basis_for(model, costs));
    const double k = closure_scale(z, model, costs, b);
    return ValueFunction(KummerValue{z.basis, costs.alpha, b, k * z.c1, k * z.c2});
  }
  throw Error(ErrorCode::RegimeMismatch, "barrier values are closed-form only in the scale and Kummer regimes");
}

ResidualReport hjb_residual_dividends(const DividendSolution& sol, const ModelParams& model, const CostParams& costs,
                                      const std::vector<double>& grid) {
  if (sol.regime == Regime::MonteCarlo)
    throw Error(ErrorCode::RegimeMismatch, "HJB residuals need a closed-form solution");
  return hjb_residual(model, costs, sol.value, grid, Boundary::ZeroValue, std::nullopt);
}

double value_at(const DividendSolution& sol, double x) { return sol.value(x); }

}  // namespace divctl
