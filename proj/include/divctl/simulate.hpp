#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "divctl/model.hpp"

namespace divctl {

struct SimConfig {
  double dt = 1e-3;
  /// ≤ 0 selects max(200/δ, 50/λ).
  double horizon = 0.0;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 20240601;
  bool antithetic = false;
  /// Paths stop once e^{-δt} falls below this factor; the remainder is
  /// covered by the reported truncation bound.
  double discount_cutoff = 1e-5;
  /// Worker threads; 0 means hardware concurrency.
  int threads = 1;
  /// In the Lévy regime, merge Euler steps into one Gaussian increment while
  /// the path is at least six standard deviations away from both barriers.
  bool aggregate = true;

  void check() const;
  double effective_horizon(const ModelParams& model, const CostParams& costs) const;
};

struct Strategy {
  double barrier = 0.0;
  bool inject = false;
};

struct PathOutcome {
  double discounted_dividends = 0.0;
  double discounted_injections = 0.0;
  double ruin_time = std::numeric_limits<double>::infinity();
  double payoff = 0.0;
  /// Surplus when the path stopped (0 after ruin).
  double terminal_surplus = 0.0;
};

/// Mutable state of one simulated path.
struct PathState {
  double t = 0.0;
  double u = 0.0;
  Rng jumps;
  Rng gauss;
  /// -1 on the antithetic partner, whose Gaussian increments are negated.
  double sign = 1.0;
};

/// Streams for path `index`: seeded from splitmix64(seed ^ index). With
/// antithetic pairing, index 2k+1 reuses the streams of 2k with sign -1.
PathState make_path_state(const SimConfig& config, std::uint64_t index, double x0);

struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
  double truncation_bound = 0.0;
  double horizon = 0.0;
  double ruined_fraction = 0.0;
  double injected_fraction = 0.0;
};

/// One path from x0 under the barrier strategy.
PathOutcome simulate_path(const ModelParams& model, const CostParams& costs, const Strategy& strategy, double x0,
                          const SimConfig& config, std::uint64_t path_index);

/// All n_paths outcomes for each starting point. Starting points share the
/// noise of each path index, so outcomes are paired across x0.
std::vector<std::vector<PathOutcome>> simulate_paths(const ModelParams& model, const CostParams& costs,
                                                     const Strategy& strategy, const std::vector<double>& x0s,
                                                     const SimConfig& config);

Estimate summarize(const std::vector<PathOutcome>& outcomes, const ModelParams& model, const CostParams& costs,
                   const Strategy& strategy, const SimConfig& config);

Estimate estimate_value(const ModelParams& model, const CostParams& costs, const Strategy& strategy, double x0,
                        const SimConfig& config);
std::vector<Estimate> estimate_values(const ModelParams& model, const CostParams& costs, const Strategy& strategy,
                                      const std::vector<double>& x0s, const SimConfig& config);

/// e^{-δT} times a bound on the value still to be collected after T.
double truncation_bound(const ModelParams& model, const CostParams& costs, const Strategy& strategy,
                        const SimConfig& config);

struct ProfilePoint {
  double barrier;
  double mean;
  double std_err;
};

struct BarrierSearchResult {
  double barrier = 0.0;
  double value = 0.0;
  double std_err = 0.0;
  std::vector<ProfilePoint> profile;
};

/// Empirical optimal barrier on [lo, hi] with common random numbers.
/// Throws FlatProfile when no barrier is significantly better than another.
BarrierSearchResult search_barrier(const ModelParams& model, const CostParams& costs, bool inject, double x0,
                                   double lo, double hi, const SimConfig& config, int grid_points = 21);

}  // namespace divctl
