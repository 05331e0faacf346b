#include "divctl/scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "divctl/errors.hpp"
#include "divctl/numerics.hpp"

namespace divctl {

namespace {

using C = std::complex<double>;

void require_levy(const ModelParams& model) {
  if (!is_levy_regime(model))
    throw Error(ErrorCode::RegimeMismatch, "scale functions need r = 0 and sigma_R = 0");
}

// (e^z - 1)/z and (e^z - 1 - z)/z², by series near the origin.
C phi1(C z) {
  if (std::abs(z) < 0.1) {
    C term = 1.0, sum = 1.0;
    for (int k = 1; k < 14; ++k) {
      term *= z / double(k + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

C phi2(C z) {
  if (std::abs(z) < 0.1) {
    C term = 0.5, sum = 0.5;
    for (int k = 1; k < 14; ++k) {
      term *= z / double(k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

// Sum of complex terms whose imaginary parts should cancel.
double real_sum(const std::vector<C>& terms, const char* what, double x) {
  C sum = 0.0;
  double mass = 0.0;
  for (const C& t : terms) {
    sum += t;
    mass += std::abs(t);
  }
  if (std::abs(sum.imag()) > 1e-8 * std::max(std::abs(sum.real()), mass)) {
    std::ostringstream msg;
    msg << what << "(" << x << ") keeps imaginary residue " << sum.imag();
    throw Error(ErrorCode::NumericalCancellation, msg.str());
  }
  return sum.real();
}

}  // namespace

C laplace_exponent(const ModelParams& model, C theta) {
  require_levy(model);
  return model.p * theta + 0.5 * model.sigma_p * model.sigma_p * theta * theta +
         model.lambda * (model.jump.laplace_transform(theta) - 1.0);
}

double laplace_exponent(const ModelParams& model, double theta) {
  return laplace_exponent(model, C(theta, 0.0)).real();
}

ScaleSet ScaleSet::build(const ModelParams& model, double delta) {
  require_levy(model);
  if (!model.jump.has_rational_transform())
    throw Error(ErrorCode::RegimeMismatch, "scale functions need a jump law with rational transform");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameter, "delta must be > 0");

  const auto [P, Q] = model.jump.rational_transform();
  // (Ψ(θ) - δ) Q(θ) = (½σ²θ² + pθ - λ - δ) Q(θ) + λ P(θ)
  Polynomial quad{{-model.lambda - delta, model.p, 0.5 * model.sigma_p * model.sigma_p}};
  if (model.sigma_p == 0.0) quad.c.pop_back();
  Polynomial N = quad * Q + model.lambda * P;
  while (N.c.size() > 1 && N.c.back() == 0.0) N.c.pop_back();
  const int n = N.degree();
  if (n < 1) throw Error(ErrorCode::RootIsolationFailure, "degenerate characteristic polynomial");
  const Polynomial dN = N.derivative();

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -N.c[static_cast<std::size_t>(i)] / N.c.back();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, false);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::RootIsolationFailure, "companion eigensolver failed");

  ScaleSet s;
  s.model_ = model;
  s.delta_ = delta;
  for (int i = 0; i < n; ++i) {
    C root = eig.eigenvalues()(i);
    for (int it = 0; it < 50; ++it) {
      const C step = N(root) / dN(root);
      root -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(root))) break;
    }
    if (std::abs(root.imag()) <= 1e-12 * std::max(1.0, std::abs(root))) root = C(root.real(), 0.0);
    s.roots_.push_back(root);
  }
  for (std::size_t i = 0; i < s.roots_.size(); ++i) {
    for (std::size_t j = i + 1; j < s.roots_.size(); ++j) {
      if (std::abs(s.roots_[i] - s.roots_[j]) < 1e-7) {
        std::ostringstream msg;
        msg << "repeated root near " << s.roots_[i] << "; perturb delta by 1e-9 and retry";
        throw Error(ErrorCode::RootIsolationFailure, msg.str());
      }
    }
  }

  int positive = 0;
  for (const C& root : s.roots_) {
    if (root.imag() == 0.0 && root.real() > 0.0) {
      ++positive;
      s.phi_ = root.real();
    }
    // Backward error of the cleared polynomial; Ψ itself blows up when a root
    // sits on a pole of the jump transform (tiny λ).
    double mass = 0.0, power = 1.0;
    for (double c : N.c) {
      mass += std::abs(c) * power;
      power *= std::abs(root);
    }
    if (!(std::abs(N(root)) <= 1e-10 * mass))
      throw Error(ErrorCode::RootIsolationFailure, "polished root does not solve Psi = delta");
    s.coef_.push_back(Q(root) / dN(root));
  }
  if (positive != 1) {
    std::ostringstream msg;
    msg << "expected exactly one positive real root of Psi = delta, found " << positive;
    throw Error(ErrorCode::RootIsolationFailure, msg.str());
  }
  return s;
}

double ScaleSet::W(double x) const {
  if (x < 0.0) return 0.0;
  std::vector<C> terms;
  for (std::size_t i = 0; i < roots_.size(); ++i) terms.push_back(coef_[i] * std::exp(roots_[i] * x));
  return std::max(0.0, real_sum(terms, "W", x));  // W >= 0; clears rounding at x = 0
}

double ScaleSet::W_prime(double x) const {
  if (x < 0.0) return 0.0;
  std::vector<C> terms;
  for (std::size_t i = 0; i < roots_.size(); ++i)
    terms.push_back(coef_[i] * roots_[i] * std::exp(roots_[i] * x));
  return real_sum(terms, "W'", x);
}

double ScaleSet::Z(double x) const {
  if (x <= 0.0) return 1.0;
  std::vector<C> terms;
  for (std::size_t i = 0; i < roots_.size(); ++i) terms.push_back(coef_[i] * x * phi1(roots_[i] * x));
  return 1.0 + delta_ * real_sum(terms, "Z", x);
}

double ScaleSet::Zbar(double x) const {
  if (x <= 0.0) return x;
  std::vector<C> terms;
  for (std::size_t i = 0; i < roots_.size(); ++i) terms.push_back(coef_[i] * x * x * phi2(roots_[i] * x));
  return x + delta_ * real_sum(terms, "Zbar", x);
}

double ScaleSet::W_by_inversion(double x, int M) const {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return model_.sigma_p > 0.0 ? 0.0 : 1.0 / model_.p;
  auto F = [&](C s) { return 1.0 / (laplace_exponent(model_, s) - delta_); };
  return talbot_invert(F, x, M, phi_ + 1.0);
}

}  // namespace divctl
