#include <catch_amalgamated.hpp>

#include "divctl/dividends.hpp"
#include "divctl/errors.hpp"
#include "divctl/simulate.hpp"
#include "oracles.hpp"

using namespace divctl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig small(std::uint64_t n = 2000, double dt = 1e-2) {
  SimConfig s;
  s.n_paths = n;
  s.dt = dt;
  return s;
}

}  // namespace

TEST_CASE("barrier zero pays the surplus at once") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs(0.9, 1.2);
  const auto o = simulate_path(m, c, Strategy{0.0, false}, 2.0, small(), 0);
  CHECK(o.payoff == 0.9 * 2.0);
  CHECK(o.ruin_time == 0.0);
  const auto e = estimate_value(m, c, Strategy{0.0, false}, 2.0, small(100));
  CHECK(e.mean == 0.9 * 2.0);
  CHECK(e.std_err == 0.0);
}

TEST_CASE("deterministic pre-jump path follows the linear ODE") {
  ModelParams m = oracle::kummer_model();
  m.lambda = 1e-12;
  const auto c = oracle::costs();
  SimConfig s = small(1, 1e-4);
  s.horizon = 2.0;
  for (double x0 : {5.0, 12.0, 13.5}) {
    const auto o = simulate_path(m, c, Strategy{100.0, false}, x0, s, 0);
    const double g = std::exp(m.r * s.horizon);
    // Exactly the Euler recursion, and within its O(dt) bias of the ODE.
    const double euler = (x0 - m.p / m.r) * std::pow(1.0 + m.r * s.dt, s.horizon / s.dt) + m.p / m.r;
    CHECK_THAT(o.terminal_surplus, WithinAbs(euler, 1e-9));
    CHECK_THAT(o.terminal_surplus, WithinAbs(x0 * g - m.p * (g - 1.0) / m.r, 2e-6));
    CHECK(o.payoff == 0.0);
    CHECK(std::isinf(o.ruin_time));
  }
  // Ruin from below at the exact hitting time of the same solution, up to one step.
  const double x1 = 0.5, t_ruin = std::log(m.p / (m.p - m.r * x1)) / m.r;
  s.horizon = 3.0;
  const auto o2 = simulate_path(m, c, Strategy{100.0, false}, x1, s, 0);
  CHECK_THAT(o2.ruin_time, WithinAbs(t_ruin, 2e-4));
}

TEST_CASE("payoff identity and determinism") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs(0.9, 1.3);
  const auto s = small(200);
  const auto a = simulate_paths(m, c, Strategy{1.0, true}, {0.0, 0.5}, s);
  const auto b = simulate_paths(m, c, Strategy{1.0, true}, {0.0, 0.5}, s);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      CHECK(a[i][k].payoff == 0.9 * a[i][k].discounted_dividends - 1.3 * a[i][k].discounted_injections);
      CHECK(a[i][k].payoff == b[i][k].payoff);
      CHECK(a[i][k].discounted_dividends >= 0.0);
      CHECK(a[i][k].discounted_injections >= 0.0);
    }
  // Without aggregation the chunking cannot depend on the other starting
  // points, so each path matches its standalone simulation.
  auto plain = s;
  plain.aggregate = false;
  const auto e = simulate_paths(m, c, Strategy{1.0, true}, {0.0, 0.5}, plain);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto o = simulate_path(m, c, Strategy{1.0, true}, 0.5, plain, k);
    CHECK_THAT(o.payoff, WithinRel(e[1][k].payoff, 1e-12));  // merged groups sum in another order
  }
  // Threads do not change results.
  auto t = s;
  t.threads = 4;
  const auto th = simulate_paths(m, c, Strategy{1.0, true}, {0.0, 0.5}, t);
  for (std::size_t k = 0; k < 200; ++k) CHECK(th[1][k].payoff == a[1][k].payoff);
}

TEST_CASE("injections happen with positive probability and cost value") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs(1.0, 1.2);
  auto s = small(10000, 1e-2);
  s.horizon = 20.0;
  const auto with = estimate_value(m, c, Strategy{0.6, true}, 0.0, s);
  CHECK(with.injected_fraction > 0.0);
  // Payoff with injections is below the dividend-only part of the same paths.
  const auto paths = simulate_paths(m, c, Strategy{0.6, true}, {0.0}, s);
  double div = 0.0, pay = 0.0;
  for (const auto& o : paths[0]) div += c.alpha * o.discounted_dividends, pay += o.payoff;
  CHECK(pay <= div);
}

TEST_CASE("standard error scales like one over root n") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs();
  auto s = small(4000, 1e-2);
  const auto e1 = estimate_value(m, c, Strategy{2.0, false}, 1.0, s);
  s.n_paths = 8000;
  const auto e2 = estimate_value(m, c, Strategy{2.0, false}, 1.0, s);
  CHECK_THAT(e1.std_err / e2.std_err, WithinRel(std::sqrt(2.0), 0.2));
}

TEST_CASE("payoff is linear in alpha without injections") {
  const auto m = oracle::scale_model(0.2);
  auto s = small(500);
  const auto e1 = estimate_value(m, oracle::costs(0.5, 1.2), Strategy{2.0, false}, 1.0, s);
  const auto e2 = estimate_value(m, oracle::costs(1.0, 1.2), Strategy{2.0, false}, 1.0, s);
  CHECK_THAT(e2.mean, WithinRel(2.0 * e1.mean, 1e-12));
}

TEST_CASE("ruin in the degenerate regime") {
  auto m = oracle::scale_model(0.3);
  m.p = 1.5;
  const auto c = oracle::costs();
  auto s = small(500);
  const auto e = estimate_value(m, c, Strategy{1.0, false}, 0.5, s);
  CHECK(e.ruined_fraction > 0.99);
}

TEST_CASE("antithetic pairs share jumps and mirror the diffusion") {
  const auto m = oracle::scale_model(0.2);
  auto s = small(4);
  s.antithetic = true;
  const auto a = make_path_state(s, 2, 0.0), b = make_path_state(s, 3, 0.0);
  CHECK(a.sign == 1.0);
  CHECK(b.sign == -1.0);
  auto ja = a.jumps, jb = b.jumps;
  CHECK(ja() == jb());
  s.n_paths = 3;
  CHECK_THROWS_AS(s.check(), Error);
}

TEST_CASE("Monte Carlo agrees with the closed form at modest size") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs();
  const auto sol = solve_dividends(m, c);
  auto s = small(20000, 1e-2);
  s.threads = 0;
  const auto e = estimate_value(m, c, Strategy{sol.b_star, false}, 1.0, s);
  // dt = 1e-2 carries a visible discretisation bias; allow it on top of 4 standard errors.
  CHECK(std::abs(e.mean - sol.value(1.0)) < 4 * e.std_err + 0.05);
  CHECK(e.truncation_bound > 0.0);
  CHECK(e.truncation_bound < 1e-2);
}

TEST_CASE("barrier search locates the closed-form barrier") {
  const auto m = oracle::scale_model(0.2);
  const auto c = oracle::costs();
  auto s = small(20000, 1e-2);
  s.threads = 0;
  const auto r = search_barrier(m, c, false, 1.0, 1.5, 6.5, s, 9);
  CHECK(std::abs(r.barrier - oracle::ref::b_star_scale) <= std::max(0.1, 0.05 * oracle::ref::b_star_scale));
  CHECK(r.profile.size() >= 9);

  auto d = m;
  d.p = 1.5;
  try {
    const auto rd = search_barrier(d, c, false, 1.0, 0.0, 4.0, s, 9);
    CHECK(rd.barrier == Catch::Approx(0.0).margin(0.5));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FlatProfile);
  }
}
