// Combined problem: branch selection at the extremes, dominance, and a single transition in β.
#include "divctl/combined.hpp"
#include "oracles.hpp"

namespace {

void extremes(oracle::Report& report, const std::string& name, const divctl::ModelParams& model) {
  {
    const auto costs = oracle::costs(1.0, 1e3);
    const auto sol = divctl::solve_combined(model, costs);
    report.check(sol.chosen == divctl::Branch::DividendsOnly,
                 name + ": beta = 1e3 selects " + std::string(divctl::to_string(sol.chosen)) +
                     oracle::fmt(" (V'(0) = %.6g, H(0) = %.6g)", sol.criteria.v_prime_at_zero, sol.criteria.h_at_zero));
    const auto grid = divctl::default_grid(2.0 * std::max(sol.dividend_sol.b_star, 1.0), 200);
    const auto dom = divctl::dominance_check(sol, grid);
    report.check(dom.passed, name + oracle::fmt(": beta = 1e3 dominance on 200 points, worst gap %.3g", dom.worst_gap));
  }
  {
    const auto costs = oracle::costs(1.0, 1.0);
    const auto sol = divctl::solve_combined(model, costs);
    report.check(sol.criteria.h_at_zero >= 0.0 && sol.chosen == divctl::Branch::WithInjections,
                 name + ": beta = alpha = 1 selects " + std::string(divctl::to_string(sol.chosen)) +
                     oracle::fmt(" (H(0) = %.6g)", sol.criteria.h_at_zero));
    const auto grid = divctl::default_grid(2.0 * std::max(sol.dividend_sol.b_star, 1.0), 200);
    const auto dom = divctl::dominance_check(sol, grid);
    report.check(dom.passed, name + oracle::fmt(": beta = 1 dominance on 200 points, worst gap %.3g", dom.worst_gap));
  }

  // 20 geometric β values on [1, 100].
  std::vector<divctl::Branch> chosen;
  std::string trail;
  for (int i = 0; i < 20; ++i) {
    const double beta = std::pow(100.0, i / 19.0);
    const auto sol = divctl::solve_combined(model, oracle::costs(1.0, beta));
    chosen.push_back(sol.chosen);
    trail += sol.chosen == divctl::Branch::WithInjections ? 'I' : sol.chosen == divctl::Branch::DividendsOnly ? 'D' : '?';
  }
  int transitions = 0;
  bool backwards = false, undetermined = false;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    undetermined = undetermined || chosen[i] == divctl::Branch::Undetermined;
    if (i > 0 && chosen[i] != chosen[i - 1]) {
      ++transitions;
      backwards = backwards || chosen[i] == divctl::Branch::WithInjections;
    }
  }
  report.check(transitions <= 1 && !backwards && !undetermined,
               name + ": beta sweep on [1, 100] is " + trail + oracle::fmt(" (%.0f transition(s))", transitions));
}

}  // namespace

int main() {
  oracle::Report report(8);
  extremes(report, "scale regime", oracle::scale_model(0.2));
  extremes(report, "Kummer regime", oracle::kummer_model());
  return report.finish(60.0);
}
