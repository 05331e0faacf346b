#pragma once

#include <complex>
#include <vector>

#include "divctl/model.hpp"

namespace divctl {

/// Ψ(θ) = pθ + ½σ_p²θ² + λ(E[e^{-θX}] - 1). Throws RegimeMismatch unless r = σ_R = 0.
double laplace_exponent(const ModelParams& model, double theta);
std::complex<double> laplace_exponent(const ModelParams& model, std::complex<double> theta);

/// δ-scale functions of the spectrally positive surplus, stored as
/// W(x) = Σ c_i e^{θ_i x} over the roots θ_i of Ψ(θ) = δ.
class ScaleSet {
 public:
  /// Throws RegimeMismatch (wrong regime or non-rational jumps) or
  /// RootIsolationFailure (root polishing fails or roots cluster below 1e-7).
  static ScaleSet build(const ModelParams& model, double delta);

  const ModelParams& model() const { return model_; }
  double delta() const { return delta_; }
  const std::vector<std::complex<double>>& roots() const { return roots_; }
  const std::vector<std::complex<double>>& coefficients() const { return coef_; }
  /// Φ(δ), the unique positive root.
  double phi() const { return phi_; }

  double psi(double theta) const { return laplace_exponent(model_, theta); }

  // x ≤ 0: W = 0, Z = 1, Z̄ = x. Throw NumericalCancellation if conjugate
  // contributions leave an imaginary residue above 1e-8 relative.
  double W(double x) const;
  double W_prime(double x) const;
  double Z(double x) const;
  double Zbar(double x) const;

  /// Independent evaluation of W by fixed-Talbot inversion of 1/(Ψ - δ).
  double W_by_inversion(double x, int M = 24) const;

 private:
  ModelParams model_;
  double delta_ = 0.0;
  double phi_ = 0.0;
  std::vector<std::complex<double>> roots_;
  std::vector<std::complex<double>> coef_;
};

inline ScaleSet build_scale_set(const ModelParams& model, double delta) { return ScaleSet::build(model, delta); }
inline double eval_W(const ScaleSet& s, double x) { return s.W(x); }
inline double eval_Z(const ScaleSet& s, double x) { return s.Z(x); }
inline double eval_Zbar(const ScaleSet& s, double x) { return s.Zbar(x); }

}  // namespace divctl
