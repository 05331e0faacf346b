#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "divctl/dividends.hpp"
#include "divctl/injections.hpp"

namespace divctl {

enum class Branch { DividendsOnly, WithInjections, Undetermined };

std::string_view to_string(Branch branch);

struct SelectionCriteria {
  double v_prime_at_zero;  ///< V_{b*}'(0+)
  double h_at_zero;        ///< H(0)
};

struct CombinedSolution {
  Branch chosen = Branch::Undetermined;
  DividendSolution dividend_sol;
  InjectionSolution injection_sol;
  SelectionCriteria criteria{};
  std::vector<std::string> diagnostics;

  const ValueFunction& value() const;
};

/// Picks dividends-only when V_{b*}'(0) ≤ β, injections when H(0) ≥ 0.
/// Overlaps are settled by pointwise comparison on a grid; gaps are Undetermined.
CombinedSolution solve_combined(const ModelParams& model, const CostParams& costs, const SolveOptions& opts = {},
                                double tol = 1e-10);

/// Three-branch HJB with the boundary max{-v(0), v'(0) - β} = 0.
struct CombinedResidual {
  ResidualReport report;
  double boundary;  ///< max{-v(0), v'(0) - β}
  bool passed(double equality_tol = 1e-6, double inequality_tol = 1e-8) const;
};
CombinedResidual hjb_residual_combined(const CombinedSolution& sol, const ModelParams& model, const CostParams& costs,
                                       const std::vector<double>& grid);

struct DominanceViolation {
  double x;
  double chosen;
  double other;
};

struct DominanceReport {
  bool passed = true;
  double worst_gap = 0.0;  ///< max(other - chosen) over the grid
  std::vector<DominanceViolation> violations;
};

/// Chosen-branch value ≥ other-branch value - tol at every grid point.
DominanceReport dominance_check(const CombinedSolution& sol, const std::vector<double>& grid, double tol = 1e-8);

}  // namespace divctl
