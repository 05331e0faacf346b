#include "divctl/solve_options.hpp"

#include <cmath>

#include "divctl/errors.hpp"

namespace divctl {

SimConfig monte_carlo_solver_defaults() {
  SimConfig c;
  c.dt = 1e-2;
  c.n_paths = 2000;
  c.discount_cutoff = 1e-4;
  return c;
}

bool kummer_regime_applies(const ModelParams& model, const CostParams& costs, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (model.sigma_p != 0.0 || model.sigma_R != 0.0) return fail("Kummer form needs sigma_p = sigma_R = 0");
  if (!(model.r > 0.0)) return fail("Kummer form needs r > 0");
  if (!std::holds_alternative<ExponentialJumps>(model.jump.variant()))
    return fail("Kummer form needs exponential jumps");
  if (model.r >= costs.delta) return fail("r >= delta: barrier values diverge, Kummer form not applicable");
  return true;
}

std::shared_ptr<const KummerBasis> kummer_basis_for(const ModelParams& model, const CostParams& costs) {
  std::string why;
  if (!kummer_regime_applies(model, costs, &why)) throw Error(ErrorCode::RegimeMismatch, why);
  const double mu = std::get<ExponentialJumps>(model.jump.variant()).rate;
  const double a = -costs.delta / model.r;
  const double b = 1.0 - (model.lambda + costs.delta) / model.r;
  return std::make_shared<const KummerBasis>(a, b, mu, model.p / model.r);
}

std::vector<double> kummer_scan_grid(double x_root, int n) {
  n = std::max(n, 8);
  const int n_geo = n / 4;
  const double lo = 1e-6 * x_root, mid = 0.02 * x_root, hi = x_root * (1.0 - 1e-9);
  std::vector<double> g;
  for (int i = 0; i < n_geo; ++i) g.push_back(lo * std::pow(mid / lo, static_cast<double>(i) / n_geo));
  const int n_lin = n - n_geo;
  for (int i = 0; i <= n_lin; ++i) g.push_back(mid + (hi - mid) * i / n_lin);
  return g;
}

std::vector<double> scan_roots(const ScalarFn& f, const std::vector<double>& grid, const Tolerance& tol) {
  std::vector<double> roots;
  std::vector<double> vals;
  vals.reserve(grid.size());
  for (double x : grid) vals.push_back(f(x));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (vals[i] == 0.0) {
      roots.push_back(grid[i]);
    } else if (vals[i] * vals[i + 1] < 0.0) {
      roots.push_back(find_root(f, grid[i], grid[i + 1], tol));
    }
  }
  return roots;
}

}  // namespace divctl
