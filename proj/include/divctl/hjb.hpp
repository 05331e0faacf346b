#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divctl/model.hpp"
#include "divctl/value_function.hpp"

namespace divctl {

/// (𝓛 - δ)V(x) for a barrier value function. The jump integral is split at
/// b - x: quadrature below, closed form over the linear part above.
/// Throws QuadratureFailure.
double generator_residual(const ModelParams& model, const CostParams& costs, const ValueFunction& v, double x);

struct ResidualPoint {
  double x;
  double value;
  double derivative;
  double generator;  ///< (𝓛 - δ)V(x)
};

/// Which boundary condition pins the value at 0.
enum class Boundary { ZeroValue, InjectionSlope };

struct ResidualReport {
  std::vector<ResidualPoint> points;
  double barrier = 0.0;
  /// max |(𝓛 - δ)V| over grid points in (0, b].
  double max_equality = 0.0;
  /// max ((𝓛 - δ)V)^+ over grid points above b.
  double max_generator_excess = 0.0;
  /// max (α - V')^+ over the grid.
  double max_lower_slope = 0.0;
  /// max (V' - β)^+ over the grid; only checked when an upper slope applies.
  double max_upper_slope = 0.0;
  /// max |V' - α| over grid points above b.
  double max_above_slope = 0.0;
  /// |V'(b-) - α|.
  double smooth_fit_first = 0.0;
  /// |V''(b-) - 0|, meaningful when σ_p > 0 in the Lévy regime; NaN otherwise.
  double smooth_fit_second = 0.0;
  /// |V(0)| or |V'(0) - β|.
  double boundary_error = 0.0;
  /// max over the grid of max{(𝓛 - δ)V, α - V', V' - β}.
  double hjb_max = 0.0;

  bool passed(double equality_tol = 1e-6, double inequality_tol = 1e-8) const;
};

/// Three-branch HJB check. `beta` enables the V' ≤ β branch.
ResidualReport hjb_residual(const ModelParams& model, const CostParams& costs, const ValueFunction& v,
                            const std::vector<double>& grid, Boundary boundary, std::optional<double> beta);

/// `n` evenly spaced points on (0, hi].
std::vector<double> default_grid(double hi, int n = 500);

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

std::vector<CheckRow> residual_rows(const ResidualReport& r, bool upper_slope, double equality_tol = 1e-6,
                                    double inequality_tol = 1e-8);

}  // namespace divctl
