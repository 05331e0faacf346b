#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "divctl/hjb.hpp"
#include "divctl/solve_options.hpp"
#include "divctl/value_function.hpp"

namespace divctl {

struct DividendSolution {
  Regime regime = Regime::Degenerate;
  double b_star = 0.0;
  ValueFunction value;
  std::shared_ptr<const ScaleSet> scale;
  Coefficients coefficients;
  std::vector<std::string> diagnostics;
  std::optional<BarrierSearchResult> search;
};

/// Optimal barrier and value without capital injections.
DividendSolution solve_dividends(const ModelParams& model, const CostParams& costs, const SolveOptions& opts = {});

/// Value of the barrier-b strategy (closed-form regimes only); used for negative controls.
ValueFunction dividend_value_for_barrier(const ModelParams& model, const CostParams& costs, double b);

/// HJB check with boundary V(0) = 0. Throws RegimeMismatch for MonteCarlo solutions.
ResidualReport hjb_residual_dividends(const DividendSolution& sol, const ModelParams& model, const CostParams& costs,
                                      const std::vector<double>& grid);

double value_at(const DividendSolution& sol, double x);

}  // namespace divctl
