#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "divctl/hjb.hpp"
#include "divctl/solve_options.hpp"
#include "divctl/value_function.hpp"

namespace divctl {

struct InjectionSolution {
  Regime regime = Regime::ScaleForm;
  double B_star = 0.0;
  ValueFunction value;
  std::shared_ptr<const ScaleSet> scale;
  Coefficients coefficients;
  std::vector<std::string> diagnostics;
  std::optional<BarrierSearchResult> search;
  /// Sign changes of H_B'(B-) - α seen on the Kummer scan (0 elsewhere).
  int crossings = 0;
};

/// Optimal upper barrier with forced injections at 0.
InjectionSolution solve_injections(const ModelParams& model, const CostParams& costs, const SolveOptions& opts = {});

/// Value of the reflected barrier-B strategy (closed-form regimes only).
ValueFunction injection_value_for_barrier(const ModelParams& model, const CostParams& costs, double B);

/// The 2×2 boundary system in the classical {M, U} pair at barrier B:
/// rows (M'(0), U'(0)) and (M'(B), U'(B)) with right-hand side (β, α).
struct KummerBoundarySystem {
  double d1, d2, d3, d4;
  double C3, C4;
  double condition;
  double slope_at_zero;     ///< C3 Δ1 + C4 Δ2
  double slope_at_barrier;  ///< C3 Δ3 + C4 Δ4
};
KummerBoundarySystem kummer_boundary_system(const ModelParams& model, const CostParams& costs, double B);

/// HJB check with boundary H'(0) = β and the upper slope branch.
ResidualReport hjb_residual_injections(const InjectionSolution& sol, const ModelParams& model,
                                       const CostParams& costs, const std::vector<double>& grid);

double value_at(const InjectionSolution& sol, double x);

}  // namespace divctl
