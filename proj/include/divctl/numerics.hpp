#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace divctl {

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_iter = 200;

  /// Throws InvalidParameter unless abs_tol, rel_tol ∈ (0, 1) and max_iter ≥ 1.
  void check() const;
};

using ScalarFn = std::function<double(double)>;

/// Bracketing root finder (TOMS 748). Requires f(lo)·f(hi) ≤ 0.
/// Throws NoBracket or MaxIterExceeded.
double find_root(const ScalarFn& f, double lo, double hi, const Tolerance& tol = {});

/// Adaptive Gauss-Kronrod quadrature on [a, b]; the interval is split at every
/// kink inside (a, b). Throws MaxIterExceeded when the error target is missed.
double integrate(const ScalarFn& f, double a, double b, const Tolerance& tol = {},
                 std::vector<double> kinks = {});

/// ∫_a^∞ f for |f(x)| ≤ amplitude·e^{-decay (x-a)}: truncated where the envelope
/// falls below abs_tol / (T - a).
double integrate_exp_tail(const ScalarFn& f, double a, double decay, double amplitude,
                          const Tolerance& tol = {}, std::vector<double> kinks = {});

/// Solves g(x) = target for increasing g, starting from [lo, hi_hint] and
/// doubling the bracket until g(hi) ≥ target. Throws TargetUnreachable past ceiling.
double invert_monotone(const ScalarFn& g, double target, double lo, double hi_hint,
                       const Tolerance& tol = {}, double ceiling = 1e8);

/// Fixed-Talbot inversion of F at t > 0. F must be analytic for Re s > shift;
/// the inversion runs on F(s + shift) and multiplies back e^{shift t}.
double talbot_invert(const std::function<std::complex<double>(std::complex<double>)>& F, double t,
                     int M = 24, double shift = 0.0);

/// Maximiser of f on [lo, hi] (Brent's parabolic/golden-section search).
double maximize(const ScalarFn& f, double lo, double hi, int bits = 40);

}  // namespace divctl
