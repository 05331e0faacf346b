#include <catch_amalgamated.hpp>

#include "divctl/dividends.hpp"
#include "divctl/errors.hpp"
#include "oracles.hpp"

using namespace divctl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("degenerate regime pays everything") {
  auto m = oracle::scale_model(0.2);
  m.p = 1.5;
  const auto c = oracle::costs(0.9, 1.2);
  const auto sol = solve_dividends(m, c);
  CHECK(sol.regime == Regime::Degenerate);
  CHECK(sol.b_star == 0.0);
  CHECK_THAT(sol.value(2.0), WithinAbs(1.8, 1e-15));
  const auto r = hjb_residual_dividends(sol, m, c, default_grid(5.0, 50));
  CHECK(r.max_lower_slope == 0.0);
  for (const auto& pt : r.points)
    CHECK_THAT(pt.generator, WithinAbs(0.9 * (1.0 - 1.5) - 0.05 * 0.9 * pt.x, 1e-12));

  // Knife edge counts as degenerate.
  m.p = 1.0;
  CHECK(solve_dividends(m, c).regime == Regime::Degenerate);
}

TEST_CASE("scale form dividends") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs(1.0, 1.2);
  const auto sol = solve_dividends(m, c);
  REQUIRE(sol.regime == Regime::ScaleForm);
  CHECK_THAT(sol.b_star, WithinAbs(oracle::ref::b_star_scale, 1e-7));
  CHECK_THAT(sol.scale->Zbar(sol.b_star), WithinAbs(net_drift(m) / c.delta, 1e-8));
  CHECK_THAT(sol.value(sol.b_star), WithinRel(net_drift(m) / c.delta, 1e-12));
  CHECK_THAT(value_at(sol, 0.0), WithinAbs(0.0, 1e-12));
  CHECK_THAT(value_at(sol, sol.b_star + 1.0) - value_at(sol, sol.b_star), WithinAbs(1.0, 1e-12));
  CHECK_THAT(sol.value.derivative(sol.b_star), WithinAbs(1.0, 1e-9));

  // Concave, increasing, slope at least alpha.
  const int n = 500;
  double prev = -1.0;
  for (int i = 1; i < n; ++i) {
    const double h = sol.b_star / n, x = i * h;
    CHECK(sol.value(x + h) - 2 * sol.value(x) + sol.value(x - h) <= 1e-8);
    CHECK(sol.value(x) >= prev);
    CHECK(sol.value.derivative(x) >= 1.0 - 1e-8);
    prev = sol.value(x);
  }
  // Second-order smooth fit.
  const double e = 1e-4;
  CHECK(std::abs(sol.value.second_derivative(sol.b_star)) < 1e-5);
  CHECK(std::abs((sol.value(sol.b_star - e) - 2 * sol.value(sol.b_star - 2 * e) + sol.value(sol.b_star - 3 * e)) /
                 (e * e)) < 1e-3);
}

TEST_CASE("alpha scales the scale-form value") {
  const auto m = oracle::scale_model(0.2);
  const auto a = solve_dividends(m, oracle::costs(1.0, 1.2));
  const auto b = solve_dividends(m, oracle::costs(0.9, 1.2));
  CHECK_THAT(b.b_star, WithinAbs(a.b_star, 1e-10));
  for (double x : {0.3, 1.0, 5.0}) CHECK_THAT(b.value(x), WithinRel(0.9 * a.value(x), 1e-12));
}

TEST_CASE("Kummer form dividends") {
  const auto m = oracle::kummer_model();
  const auto c = oracle::costs(1.0, 1.2);
  const auto sol = solve_dividends(m, c);
  REQUIRE(sol.regime == Regime::KummerForm);
  CHECK(sol.b_star > 0.0);
  CHECK(sol.b_star < m.p / m.r);
  CHECK_THAT(sol.b_star, WithinAbs(oracle::ref::kummer_b_star, 1e-9));
  CHECK_THAT(sol.value(0.0), WithinAbs(0.0, 1e-12));
  CHECK_THAT(sol.value.derivative(sol.b_star), WithinAbs(1.0, 1e-8));

  // Dense-scan oracle: b* is the largest b with V_b'(b-) = alpha.
  const auto roots = oracle::dense_roots(
      [&](double b) { return dividend_value_for_barrier(m, c, b).derivative(b) - c.alpha; }, 0.05,
      m.p / m.r * (1 - 1e-4), 2000);
  REQUIRE(!roots.empty());
  CHECK_THAT(roots.back(), WithinAbs(sol.b_star, 1e-8));

  // Strictly negative generator above b* on (b*, 2b*).
  for (int i = 1; i <= 20; ++i) {
    const double x = sol.b_star * (1.0 + i / 20.0);
    CHECK(generator_residual(m, c, sol.value, x) < 0.0);
  }

  bool reported = false;
  for (const auto& [name, v] : sol.coefficients)
    if (name == "argmax_inv_Delta") reported = std::isfinite(v);
  CHECK(reported);
}

TEST_CASE("Monte Carlo fallback outside closed-form regimes") {
  auto m = oracle::scale_model(0.3);
  m.r = 0.02;
  m.sigma_R = 0.1;
  SolveOptions opts;
  opts.sim.n_paths = 400;
  opts.sim.dt = 2e-2;
  opts.mc_grid_points = 9;
  opts.mc_value_points = 5;
  try {
    const auto sol = solve_dividends(m, oracle::costs(), opts);
    CHECK(sol.regime == Regime::MonteCarlo);
    CHECK(sol.search.has_value());
    CHECK_THROWS_AS(hjb_residual_dividends(sol, m, oracle::costs(), default_grid(1.0, 10)), Error);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FlatProfile);
  }
}

TEST_CASE("perturbed barrier fails the residual check") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs();
  const auto sol = solve_dividends(m, c);
  const auto v = dividend_value_for_barrier(m, c, sol.b_star + 0.1);
  const auto r = hjb_residual(m, c, v, default_grid(2 * sol.b_star, 500), Boundary::ZeroValue, std::nullopt);
  CHECK_FALSE(r.passed());
  CHECK(hjb_residual_dividends(sol, m, c, default_grid(2 * sol.b_star, 500)).passed());
}
