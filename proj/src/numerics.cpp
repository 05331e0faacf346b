#include "divctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "divctl/errors.hpp"

namespace divctl {

void Tolerance::check() const {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(abs_tol) || !unit(rel_tol) || max_iter < 1)
    throw Error(ErrorCode::InvalidParameter, "tolerance must have abs_tol, rel_tol in (0,1) and max_iter >= 1");
}

double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
  tol.check();
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]: f = " << flo << ", " << fhi;
    throw Error(ErrorCode::NoBracket, msg.str());
  }
  // The midpoint is returned, so the half-width bounds the error.
  auto done = [&](double a, double b) { return 0.5 * std::abs(b - a) <= tol.abs_tol + tol.rel_tol * std::abs(a); };
  std::uintmax_t iters = static_cast<std::uintmax_t>(tol.max_iter);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  if (!done(a, b) && iters >= static_cast<std::uintmax_t>(tol.max_iter))
    throw Error(ErrorCode::MaxIterExceeded, "root finder did not converge");
  return 0.5 * (a + b);
}

double integrate(const ScalarFn& f, double a, double b, const Tolerance& tol, std::vector<double> kinks) {
  tol.check();
  if (a > b) throw Error(ErrorCode::InvalidParameter, "integrate requires a <= b");
  if (a == b) return 0.0;
  kinks.erase(std::remove_if(kinks.begin(), kinks.end(), [&](double k) { return !(k > a && k < b); }),
              kinks.end());
  std::sort(kinks.begin(), kinks.end());
  std::vector<double> nodes{a};
  nodes.insert(nodes.end(), kinks.begin(), kinks.end());
  nodes.push_back(b);

  const unsigned depth = static_cast<unsigned>(std::clamp(tol.max_iter, 1, 15));
  double total = 0.0;
  double total_err = 0.0;
  double total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1] <= nodes[i]) continue;
    double err = 0.0;
    double l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, nodes[i], nodes[i + 1], depth,
                                                                          tol.rel_tol, &err, &l1);
    total_err += err;
    total_l1 += l1;
  }
  // Boost scales the error target by the L1 norm; accept either measure.
  const double target = std::max({tol.abs_tol, tol.rel_tol * std::abs(total), tol.rel_tol * total_l1});
  if (!(total_err <= target)) {
    std::ostringstream msg;
    msg << "quadrature error " << total_err << " above target " << target << " on [" << a << ", " << b << "]";
    throw Error(ErrorCode::MaxIterExceeded, msg.str());
  }
  return total;
}

double integrate_exp_tail(const ScalarFn& f, double a, double decay, double amplitude, const Tolerance& tol,
                          std::vector<double> kinks) {
  if (!(decay > 0.0)) throw Error(ErrorCode::InvalidParameter, "tail decay rate must be > 0");
  amplitude = std::max(std::abs(amplitude), 1e-300);
  // Fixed point of amplitude·e^{-decay L} = abs_tol / L.
  double len = 1.0 / decay;
  for (int i = 0; i < 8; ++i)
    len = std::max(1.0 / decay, std::log(amplitude * len / tol.abs_tol) / decay);
  const double b = a + len;
  // Panels a few decay lengths wide keep the adaptive rule efficient.
  const double panel = 4.0 / decay;
  for (double x = a + panel; x < b; x += panel) kinks.push_back(x);
  return integrate(f, a, b, tol, std::move(kinks));
}

double invert_monotone(const ScalarFn& g, double target, double lo, double hi_hint, const Tolerance& tol,
                       double ceiling) {
  const double glo = g(lo);
  if (glo == target) return lo;
  if (glo > target) throw Error(ErrorCode::NoBracket, "invert_monotone requires g(lo) <= target");
  double hi = std::max(hi_hint, lo + tol.abs_tol);
  while (g(hi) < target) {
    if (hi > ceiling) throw Error(ErrorCode::TargetUnreachable, "monotone inversion target not reached below ceiling");
    hi = lo + 2.0 * (hi - lo);
  }
  return find_root([&](double x) { return g(x) - target; }, lo, hi, tol);
}

double talbot_invert(const std::function<std::complex<double>(std::complex<double>)>& F, double t, int M,
                     double shift) {
  if (!(t > 0.0) || M < 2) throw Error(ErrorCode::InvalidParameter, "talbot_invert requires t > 0 and M >= 2");
  using C = std::complex<double>;
  const double r = 2.0 * M / (5.0 * t);
  double acc = 0.5 * std::exp(r * t) * F(C(r + shift, 0.0)).real();
  for (int k = 1; k < M; ++k) {
    const double theta = k * M_PI / M;
    const double cot = std::cos(theta) / std::sin(theta);
    const C s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    acc += (std::exp(t * s) * F(s + shift) * C(1.0, sigma)).real();
  }
  return std::exp(shift * t) * r / M * acc;
}

double maximize(const ScalarFn& f, double lo, double hi, int bits) {
  auto [x, fx] = boost::math::tools::brent_find_minima([&](double v) { return -f(v); }, lo, hi, bits);
  (void)fx;
  return x;
}

}  // namespace divctl
