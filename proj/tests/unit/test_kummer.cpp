#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include "divctl/errors.hpp"
#include "divctl/kummer.hpp"
#include "oracles.hpp"

using namespace divctl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("M special values") {
  CHECK(kummer_M(0.3, 1.7, 0.0) == 1.0);
  for (double z : {-2.0, 0.5, 3.0}) CHECK_THAT(kummer_M(1.0, 1.0, z), WithinRel(std::exp(z), 1e-12));
  CHECK_THAT(kummer_M(-0.5, 0.8, -1.3), WithinRel(oracle::kummer_M_series(-0.5, 0.8, -1.3), 1e-13));
  CHECK_THAT(kummer_M_prime(0.4, 1.3, 0.0), WithinRel(0.4 / 1.3, 1e-14));
  const double h = 1e-5;
  CHECK_THAT((kummer_M(-0.5, 0.8, 1.1 + h) - kummer_M(-0.5, 0.8, 1.1 - h)) / (2 * h),
             WithinRel(kummer_M_prime(-0.5, 0.8, 1.1), 1e-6));
  // Kummer's transformation.
  for (double z = -10.0; z <= 10.0; z += 0.5)
    CHECK_THAT(kummer_M(0.7, 2.3, z), WithinRel(std::exp(z) * kummer_M(2.3 - 0.7, 2.3, -z), 1e-10));
}

TEST_CASE("M poles") {
  try {
    kummer_M(0.5, -2.0, 1.0);
    FAIL("expected ParameterPole");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParameterPole);
  }
  CHECK_THROWS_AS(KummerParams::make(0.5, 0.0), Error);
}

TEST_CASE("U special values") {
  CHECK_THAT(kummer_U(0.0, 1.4, 2.0), WithinAbs(1.0, 1e-14));
  CHECK_THAT(kummer_U_prime(0.0, 1.4, 2.0), WithinAbs(0.0, 1e-14));
  CHECK(std::abs(kummer_U(0.3, 0.7, 1e3) * std::pow(1e3, 0.3) - 1.0) < 1e-2);
  // Connection formula with independently computed gamma values.
  const double a = -0.3, b = 0.6, z = 2.0;
  using boost::math::tgamma;
  const double u = tgamma(1 - b) / tgamma(a + 1 - b) * oracle::kummer_M_series(a, b, z) +
                   tgamma(b - 1) / tgamma(a) * std::pow(z, 1 - b) * oracle::kummer_M_series(a - b + 1, 2 - b, z);
  CHECK_THAT(kummer_U(a, b, z), WithinRel(u, 1e-12));
  CHECK_THAT(kummer_U(1.3, 0.4, 20.0), WithinRel(0.018188197742420, 1e-12));
  CHECK_THROWS_AS(kummer_U(0.5, 0.5, -1.0), Error);
  // Integer b through the interpolation path: U(1, 2, z) = 1/z.
  CHECK_THAT(kummer_U(1.0, 2.0, 1.5), WithinRel(1.0 / 1.5, 1e-9));
}

TEST_CASE("negative-argument solution and basis") {
  const double a = -1.25, b = -25.25;
  CHECK_THAT(kummer_U_negative(a, b, -12.5), WithinRel(oracle::ref::kummer_ReU_z0, 1e-10));
  CHECK_THAT(kummer_U_negative_prime(a, b, -12.5), WithinRel(oracle::ref::kummer_ReU_prime_z0, 1e-10));
  // The regular solution satisfies the ODE.
  for (double z : {-12.0, -5.0, -0.5}) {
    const double h = 1e-3;
    auto d = [&](double s) { return kummer_regular_prime(a, b, z + s, -12.5); };
    const double f = kummer_regular(a, b, z, -12.5), fp = d(0.0);
    const double fpp = (8 * (d(h) - d(-h)) - (d(2 * h) - d(-2 * h))) / (12 * h);
    const double scale = std::max({std::abs(z * fpp), std::abs((b - z) * fp), std::abs(a * f)});
    CHECK(std::abs(z * fpp + (b - z) * fp - a * f) / scale < 1e-6);
  }
  const KummerBasis basis(a, b, 1.0, 12.5);
  CHECK_THAT(basis.z(0.0), WithinAbs(-12.5, 1e-15));
  CHECK_THAT(basis.M(0.0), WithinRel(oracle::ref::kummer_M_z0, 1e-10));
  CHECK_THAT(basis.U(0.0), WithinRel(oracle::ref::kummer_ReU_z0, 1e-10));
  const double h = 1e-5;
  for (double x : {0.5, 3.0, 10.0}) {
    CHECK_THAT((basis.y1(x + h) - basis.y1(x - h)) / (2 * h), WithinRel(basis.y1_prime(x), 1e-6));
    CHECK_THAT((basis.y2(x + h) - basis.y2(x - h)) / (2 * h), WithinRel(basis.y2_prime(x), 1e-6));
    CHECK_THAT((basis.M(x + h) - basis.M(x - h)) / (2 * h), WithinRel(basis.M_prime(x), 1e-6));
  }
}

TEST_CASE("near-integer b stays continuous") {
  const double z = 1.7, a = 0.6;
  const double at = kummer_U(a, 2.0, z);
  for (double eps : {1e-9, 1e-6, 1e-5, 5e-4}) {
    CHECK_THAT(kummer_U(a, 2.0 + eps, z), WithinRel(at, 10 * eps + 1e-9));
    CHECK_THAT(kummer_U(a, 2.0 - eps, z), WithinRel(at, 10 * eps + 1e-9));
  }
}
