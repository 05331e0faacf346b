#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "divctl/errors.hpp"
#include "divctl/model.hpp"

using namespace divctl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<JumpLaw> laws() {
  return {JumpLaw::exponential(1.5), JumpLaw::hyper_exponential({0.3, 0.7}, {0.5, 4.0}), JumpLaw::erlang(3, 2.0)};
}

bool has(const std::vector<Diagnostic>& ds, Severity s, const std::string& field) {
  for (const auto& d : ds)
    if (d.severity == s && d.field == field) return true;
  return false;
}

}  // namespace

TEST_CASE("validate flags errors and warnings by field") {
  ModelParams m;
  m.p = 0.5;
  CostParams c{0.05, 0.9, 1.2};
  CHECK(validate(m, c).empty());

  m.p = 1.5;
  const auto w = validate(m, c);
  REQUIRE(w.size() == 1);
  CHECK(w[0].severity == Severity::Warning);

  m.p = 0.5;
  c.alpha = 0.0;
  CHECK(has(validate(m, c), Severity::Error, "costs.alpha"));
  CHECK_THROWS_AS(require_valid(m, c), Error);

  c = CostParams{0.05, 1.0, 0.5};
  CHECK(has(validate(m, c), Severity::Error, "costs.beta"));
  c = CostParams{};
  m.rho = 1.5;
  CHECK(has(validate(m, c), Severity::Error, "model.rho"));
  m.rho = 0.0;
  m.jump = JumpLaw::hyper_exponential({0.5, 0.4}, {1.0, 2.0});
  CHECK(!validate(m, c).empty());
}

TEST_CASE("generator coefficients") {
  ModelParams m;
  m.sigma_p = 0.2;
  auto g = generator_coefficients(m, 3.0);
  CHECK_THAT(g.drift, WithinAbs(-0.5, 1e-15));
  CHECK_THAT(g.diffusion, WithinAbs(0.02, 1e-15));

  m.r = 0.04;
  CHECK_THAT(generator_coefficients(m, 12.5).drift, WithinAbs(0.0, 1e-15));

  m.sigma_R = 0.2;
  m.rho = -1.0;
  CHECK_THAT(generator_coefficients(m, 1.0).diffusion, WithinAbs(0.0, 1e-15));
  m.sigma_R = 0.1;
  CHECK_THAT(generator_coefficients(m, 2.0).diffusion, WithinAbs(0.0, 1e-15));

  // Sum of squares: never negative.
  for (double rho : {-1.0, -0.3, 0.0, 0.7, 1.0})
    for (double y : {0.0, 0.5, 3.0, 40.0}) {
      m.rho = rho;
      CHECK(generator_coefficients(m, y).diffusion >= 0.0);
    }
}

TEST_CASE("jump laws: mean, transform and tail functions agree with quadrature") {
  boost::math::quadrature::exp_sinh<double> q;
  for (const auto& law : laws()) {
    INFO(law.kind());
    CHECK(law.invariant_violations().empty());
    CHECK_THAT(law.laplace_transform(0.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(q.integrate([&](double x) { return x * law.density(x); }), WithinRel(law.mean(), 1e-8));
    CHECK_THAT(q.integrate([&](double x) { return law.density(x); }), WithinRel(1.0, 1e-10));
    for (double theta : {0.1, 1.0, 10.0}) {
      const double lt = q.integrate([&](double x) { return std::exp(-theta * x) * law.density(x); });
      CHECK_THAT(law.laplace_transform(theta), WithinRel(lt, 1e-8));
      CHECK_THAT(law.laplace_transform(std::complex<double>(theta, 0.0)).real(), WithinRel(lt, 1e-12));
    }
    for (double u : {0.0, 0.3, 2.0}) {
      const double tail = q.integrate([&](double x) { return law.density(u + x); });
      CHECK_THAT(law.tail(u), WithinRel(tail, 1e-8));
      const double sl = q.integrate([&](double x) { return x * law.density(u + x); });
      CHECK_THAT(law.stop_loss(u), WithinRel(sl, 1e-8));
    }
    // Completely monotone: decreasing and convex on a grid.
    double prev = 1.0, prev_step = -1e300;
    for (int i = 1; i <= 50; ++i) {
      const double v = law.laplace_transform(0.2 * i);
      CHECK(v < prev);
      CHECK(v - prev >= prev_step - 1e-15);
      prev_step = v - prev;
      prev = v;
    }
    CHECK(law.has_rational_transform());
  }
}

TEST_CASE("jump law sampling mean within five standard errors") {
  Rng rng(7);
  for (const auto& law : laws()) {
    const int n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = law.sample(rng);
      REQUIRE(x > 0.0);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - law.mean()) < 5.0 * se);
  }
}

TEST_CASE("rational transform reproduces the transform") {
  for (const auto& law : laws()) {
    const auto rt = law.rational_transform();
    for (double theta : {0.0, 0.7, 3.0}) {
      double num = 0.0, den = 0.0;
      for (int k = rt.numerator.degree(); k >= 0; --k) num = num * theta + rt.numerator.c[k];
      for (int k = rt.denominator.degree(); k >= 0; --k) den = den * theta + rt.denominator.c[k];
      CHECK_THAT(num / den, WithinRel(law.laplace_transform(theta), 1e-12));
    }
  }
}

TEST_CASE("regime helpers") {
  ModelParams m;
  CHECK(is_levy_regime(m));
  CHECK_THAT(net_drift(m), WithinAbs(0.5, 1e-15));
  m.r = 0.01;
  CHECK_FALSE(is_levy_regime(m));
}
