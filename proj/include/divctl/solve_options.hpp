#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "divctl/kummer.hpp"
#include "divctl/model.hpp"
#include "divctl/numerics.hpp"
#include "divctl/simulate.hpp"

namespace divctl {

/// Monte Carlo settings used when no closed form applies: coarser than the
/// SimConfig defaults because a barrier search runs one estimate per grid point.
SimConfig monte_carlo_solver_defaults();

struct SolveOptions {
  /// Tolerance for barrier roots and inversions.
  Tolerance tol{1e-13, 1e-13, 200};
  /// Points of the sign-change scan on (0, p/r) in the Kummer regime.
  int scan_points = 600;
  SimConfig sim = monte_carlo_solver_defaults();
  /// Upper end of the Monte Carlo barrier search; ≤ 0 picks λE[X]/(2δ) clamped to [1, 50].
  double mc_hi = 0.0;
  /// Starting point used to compare barriers; ≤ 0 picks min(1, hi/10).
  double mc_x0 = 0.0;
  int mc_grid_points = 21;
  /// Points of the empirical value table on [0, 1.5 b].
  int mc_value_points = 11;
};

using Coefficients = std::vector<std::pair<std::string, double>>;

/// σ_p = σ_R = 0, r ∈ (0, δ), exponential jumps. `why` receives the reason when false.
bool kummer_regime_applies(const ModelParams& model, const CostParams& costs, std::string* why = nullptr);

/// Basis with a = -δ/r, b = 1 - (λ+δ)/r, z = μ(x - p/r).
std::shared_ptr<const KummerBasis> kummer_basis_for(const ModelParams& model, const CostParams& costs);

/// Sign-change scan grid on (0, x_root): geometric near 0, uniform after.
std::vector<double> kummer_scan_grid(double x_root, int n);

/// Roots of f on the scan grid, refined by the bracketing solver.
std::vector<double> scan_roots(const ScalarFn& f, const std::vector<double>& grid, const Tolerance& tol);

}  // namespace divctl
