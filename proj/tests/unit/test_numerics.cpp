#include <catch_amalgamated.hpp>

#include <random>

#include "divctl/errors.hpp"
#include "divctl/numerics.hpp"
#include "divctl/scale.hpp"

using namespace divctl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("find_root") {
  CHECK_THAT(find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0), WithinAbs(std::sqrt(2.0), 1e-10));
  CHECK_THAT(find_root([](double x) { return x; }, -1.0, 1.0), WithinAbs(0.0, 1e-10));
  try {
    find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0);
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoBracket);
  }

  // Φ(δ) against a dense scan and bisection.
  ModelParams m;
  m.sigma_p = 0.2;
  auto f = [&](double th) { return laplace_exponent(m, th) - 0.05; };
  double lo = 0.01, hi = 0.01;
  while (f(hi + 0.01) < 0.0) hi += 0.01;
  lo = hi;
  hi += 0.01;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = find_root(f, 0.01, 50.0, Tolerance{1e-13, 1e-13, 200});
  CHECK_THAT(root, WithinAbs(0.5 * (lo + hi), 1e-12));

  // Bracket property.
  const Tolerance tol{};
  const double x = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, tol);
  CHECK((std::cos(x - tol.abs_tol) - (x - tol.abs_tol)) * (std::cos(x + tol.abs_tol) - (x + tol.abs_tol)) <= 0.0);
}

TEST_CASE("integrate") {
  CHECK_THAT(integrate([](double x) { return x; }, 0.0, 1.0), WithinAbs(0.5, 1e-14));
  CHECK_THAT(integrate_exp_tail([](double x) { return std::exp(-x); }, 0.0, 1.0, 1.0), WithinAbs(1.0, 1e-10));
  // Kinks are honoured.
  CHECK_THAT(integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, {0.3}),
             WithinAbs(0.5 * (0.09 + 0.49), 1e-13));
  // Linearity.
  auto f = [](double x) { return std::sin(3 * x); };
  auto g = [](double x) { return std::exp(x); };
  const double a = integrate(f, 0.0, 2.0), b = integrate(g, 0.0, 2.0);
  const double ab = integrate([&](double x) { return f(x) + g(x); }, 0.0, 2.0);
  CHECK(std::abs(ab - a - b) <= 1e-9);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.5)); }, 0.0, 1.0, Tolerance{1e-14, 1e-14, 2}),
                  Error);
}

TEST_CASE("scale companions through quadrature and inversion") {
  ModelParams m;
  m.sigma_p = 0.2;
  const auto s = ScaleSet::build(m, 0.05);
  const double b = invert_monotone([&](double x) { return s.Zbar(x); }, net_drift(m) / 0.05, 0.0, 1.0,
                                   Tolerance{1e-13, 1e-13, 200});
  // Grid tabulation plus bisection as the oracle.
  double lo = 0.0, hi = 0.0;
  while (s.Zbar(hi) < 10.0) hi += 0.1;
  lo = hi - 0.1;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (s.Zbar(mid) < 10.0 ? lo : hi) = mid;
  }
  CHECK_THAT(b, WithinAbs(0.5 * (lo + hi), 1e-10));
  CHECK_THAT(integrate([&](double y) { return s.Z(y); }, 0.0, b), WithinAbs(s.Zbar(b), 1e-8));
  CHECK_THAT(invert_monotone([&](double x) { return s.Z(x); }, 1.0, 0.0, 1.0), WithinAbs(0.0, 1e-10));
}

TEST_CASE("invert_monotone") {
  CHECK_THAT(invert_monotone([](double x) { return x; }, 3.0, 0.0, 1.0), WithinAbs(3.0, 1e-9));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), c = u(rng), x = u(rng);
    auto g = [&](double y) { return a * y + c * std::tanh(y) + y * y * y; };
    CHECK_THAT(invert_monotone(g, g(x), 0.0, 1.0), WithinAbs(x, 1e-9));
  }
  try {
    invert_monotone([](double x) { return std::tanh(x); }, 2.0, 0.0, 1.0);
    FAIL("expected TargetUnreachable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TargetUnreachable);
  }
}

TEST_CASE("talbot inversion and maximisation") {
  const double t = 1.3;
  const double v = talbot_invert([](std::complex<double> s) { return 1.0 / (s + 2.0); }, t);
  CHECK_THAT(v, WithinRel(std::exp(-2.0 * t), 1e-9));
  CHECK_THAT(maximize([](double x) { return -(x - 0.7) * (x - 0.7); }, 0.0, 2.0), WithinAbs(0.7, 1e-8));
}

TEST_CASE("tolerance validation") {
  CHECK_NOTHROW(Tolerance{}.check());
  CHECK_THROWS_AS((Tolerance{0.0, 1e-10, 10}.check()), Error);
  CHECK_THROWS_AS((Tolerance{1e-10, 1e-10, 0}.check()), Error);
}
