#include "divctl/kummer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

using Real = long double;

constexpr Real kNearInteger = 1e-4L;

bool is_nonpositive_integer(Real b) {
  return b <= 0.0L && std::abs(b - std::round(b)) < 1e-12L * std::max(Real(1), std::abs(b));
}

std::string where(Real a, Real b, Real z) {
  std::ostringstream os;
  os << "(a=" << static_cast<double>(a) << ", b=" << static_cast<double>(b) << ", z=" << static_cast<double>(z)
     << ")";
  return os.str();
}

Real M_impl(Real a, Real b, Real z) {
  if (is_nonpositive_integer(b)) throw Error(ErrorCode::ParameterPole, "M undefined at " + where(a, b, z));
  if (z == 0.0L || a == 0.0L) return 1.0L;
  try {
    return boost::math::hypergeometric_1F1(a, b, z);
  } catch (const std::domain_error& e) {
    throw Error(ErrorCode::ParameterPole, "M " + where(a, b, z) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::NonConvergence, "M " + where(a, b, z) + ": " + e.what());
  }
}

// Γ(num)/Γ(den) with 1/Γ = 0 at poles of the denominator.
Real gamma_ratio(Real num, Real den) {
  if (is_nonpositive_integer(den)) return 0.0L;
  int sn = 1, sd = 1;
  const Real ln = boost::math::lgamma(num, &sn);
  const Real ld = boost::math::lgamma(den, &sd);
  return static_cast<Real>(sn * sd) * std::exp(ln - ld);
}

// U ~ z^{-a} Σ (a)_n (a-b+1)_n / n! (-1/z)^n; returns false unless the smallest
// term drops below 1e-17 of the sum.
bool U_asymptotic(Real a, Real b, Real z, Real& out) {
  const Real c = a - b + 1.0L;
  Real term = 1.0L, sum = 1.0L;
  for (int n = 0; n < 500; ++n) {
    const Real next = term * (a + n) * (c + n) / ((n + 1) * -z);
    if (next == 0.0L) break;
    if (std::abs(next) >= std::abs(term)) return false;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-19L * std::abs(sum)) break;
  }
  if (!(std::abs(term) < 1e-17L * std::abs(sum)) && term != 0.0L) return false;
  out = std::pow(z, -a) * sum;
  return true;
}

// Two-M connection formula; z^{1-b} becomes cos(π(1-b)) (-z)^{1-b} on z < 0.
Real U_connection(Real a, Real b, Real z) {
  const Real first = gamma_ratio(1.0L - b, a - b + 1.0L) * M_impl(a, b, z);
  Real second = 0.0L;
  const Real g = gamma_ratio(b - 1.0L, a);
  if (g != 0.0L) {
    Real scale;
    if (z > 0.0L) {
      scale = std::pow(z, 1.0L - b);
    } else {
      const Real frac = (1.0L - b) - 2.0L * std::floor(0.5L * (1.0L - b));
      scale = std::cos(boost::math::constants::pi<Real>() * frac) * std::pow(-z, 1.0L - b);
    }
    second = g * scale * M_impl(a - b + 1.0L, 2.0L - b, z);
  }
  return first + second;
}

// Connection formula with cubic interpolation across integer b, where the
// two terms have cancelling poles.
Real U_any_b(Real a, Real b, Real z) {
  const Real k = std::round(b);
  if (std::abs(b - k) >= kNearInteger) return U_connection(a, b, z);
  const Real h[4] = {-4e-4L, -2e-4L, 2e-4L, 4e-4L};
  Real value = 0.0L;
  for (int i = 0; i < 4; ++i) {
    Real weight = 1.0L;
    for (int j = 0; j < 4; ++j)
      if (j != i) weight *= (b - k - h[j]) / (h[i] - h[j]);
    value += weight * U_connection(a, k + h[i], z);
  }
  return value;
}

// U = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt, a > 0.
Real U_integral(Real a, Real b, Real z) {
  boost::math::quadrature::exp_sinh<Real> quad;
  auto f = [&](Real t) { return std::exp(-z * t + (a - 1.0L) * std::log(t) + (b - a - 1.0L) * std::log1p(t)); };
  return quad.integrate(f) / boost::math::tgamma(a);
}

Real U_positive(Real a, Real b, Real z) {
  if (!(z > 0.0L)) throw Error(ErrorCode::BranchDomain, "principal U needs z > 0, got " + where(a, b, z));
  if (a == 0.0L) return 1.0L;
  Real out;
  if (U_asymptotic(a, b, z, out)) return out;
  // Past z ≈ 5 the connection formula cancels e^z-sized terms.
  if (z > 5.0L) {
    if (a > 0.0L) return U_integral(a, b, z);
    if (a - b + 1.0L > 0.0L) return std::pow(z, 1.0L - b) * U_integral(a - b + 1.0L, 2.0L - b, z);
  }
  return U_any_b(a, b, z);
}

Real U_negative(Real a, Real b, Real z) {
  if (!(z < 0.0L)) throw Error(ErrorCode::BranchDomain, "negative-axis U needs z < 0, got " + where(a, b, z));
  if (a == 0.0L) return 1.0L;
  return U_any_b(a, b, z);
}

}  // namespace

KummerParams KummerParams::make(double a, double b) {
  if (is_nonpositive_integer(b)) throw Error(ErrorCode::ParameterPole, "b must not be a non-positive integer");
  return {a, b};
}

double kummer_M(double a, double b, double z) { return static_cast<double>(M_impl(a, b, z)); }

double kummer_M_prime(double a, double b, double z) {
  if (a == 0.0) return 0.0;
  return static_cast<double>(Real(a) / Real(b) * M_impl(Real(a) + 1.0L, Real(b) + 1.0L, z));
}

double kummer_U(double a, double b, double z) { return static_cast<double>(U_positive(a, b, z)); }

double kummer_U_prime(double a, double b, double z) {
  if (a == 0.0) return 0.0;
  return static_cast<double>(-Real(a) * U_positive(Real(a) + 1.0L, Real(b) + 1.0L, z));
}

double kummer_U_negative(double a, double b, double z) { return static_cast<double>(U_negative(a, b, z)); }

double kummer_U_negative_prime(double a, double b, double z) {
  if (a == 0.0) return 0.0;
  return static_cast<double>(-Real(a) * U_negative(Real(a) + 1.0L, Real(b) + 1.0L, z));
}

double kummer_regular(double a, double b, double z, double z_ref) {
  if (!(z < 0.0) || !(z_ref < 0.0)) throw Error(ErrorCode::BranchDomain, "regular solution needs z, z_ref < 0");
  const Real e = 1.0L - Real(b);
  return static_cast<double>(std::pow(Real(z) / Real(z_ref), e) * M_impl(Real(a) + e, 1.0L + e, z));
}

double kummer_regular_prime(double a, double b, double z, double z_ref) {
  if (!(z < 0.0) || !(z_ref < 0.0)) throw Error(ErrorCode::BranchDomain, "regular solution needs z, z_ref < 0");
  const Real e = 1.0L - Real(b);
  const Real c = Real(a) + e;
  const Real scale = std::pow(Real(z) / Real(z_ref), e);
  // d/dz (-z)^e = e (-z)^e / z
  const Real value = scale * (e / Real(z) * M_impl(c, 1.0L + e, z) + c / (1.0L + e) * M_impl(c + 1.0L, 2.0L + e, z));
  return static_cast<double>(value);
}

KummerBasis::KummerBasis(double a, double b, double mu, double x_root)
    : a_(a), b_(b), mu_(mu), x_root_(x_root), z_ref_(-mu * x_root) {
  KummerParams::make(a, b);
  if (!(mu > 0.0) || !(x_root > 0.0)) throw Error(ErrorCode::InvalidParameter, "Kummer basis needs mu, x_root > 0");
}

double KummerBasis::y1(double x) const { return kummer_U_negative(a_, b_, z(x)); }
double KummerBasis::y1_prime(double x) const { return mu_ * kummer_U_negative_prime(a_, b_, z(x)); }
double KummerBasis::y2(double x) const { return kummer_regular(a_, b_, z(x), z_ref_); }
double KummerBasis::y2_prime(double x) const { return mu_ * kummer_regular_prime(a_, b_, z(x), z_ref_); }
double KummerBasis::M(double x) const { return kummer_M(a_, b_, z(x)); }
double KummerBasis::M_prime(double x) const { return mu_ * kummer_M_prime(a_, b_, z(x)); }

}  // namespace divctl
