#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

namespace divctl {

/// Random engine used by every sampler. Boost's engines and distributions
/// produce identical streams on every platform.
using Rng = boost::random::mt19937_64;

/// Polynomial in ascending powers: c[0] + c[1] x + c[2] x^2 + ...
struct Polynomial {
  std::vector<double> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  std::complex<double> operator()(std::complex<double> x) const;
  double operator()(double x) const;
  Polynomial derivative() const;
};

Polynomial operator+(const Polynomial& lhs, const Polynomial& rhs);
Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
Polynomial operator*(double s, const Polynomial& p);

/// Laplace transform P(θ)/Q(θ) of a jump law with rational transform.
struct RationalTransform {
  Polynomial numerator;
  Polynomial denominator;
};

struct ExponentialJumps {
  double rate;
};

struct HyperExponentialJumps {
  std::vector<double> weights;
  std::vector<double> rates;
};

struct ErlangJumps {
  int shape;
  double rate;
};

/// Extension hook: any positive law given by its sampler and transform.
/// Only the Monte Carlo path can consume it.
struct GeneralJumps {
  double mean;
  std::function<double(Rng&)> sampler;
  std::function<std::complex<double>(std::complex<double>)> laplace;
};

/// Distribution F of the (strictly positive) gains.
class JumpLaw {
 public:
  using Variant = std::variant<ExponentialJumps, HyperExponentialJumps, ErlangJumps, GeneralJumps>;

  JumpLaw() : law_(ExponentialJumps{1.0}) {}
  explicit JumpLaw(Variant law) : law_(std::move(law)) {}

  static JumpLaw exponential(double rate) { return JumpLaw(ExponentialJumps{rate}); }
  static JumpLaw hyper_exponential(std::vector<double> weights, std::vector<double> rates) {
    return JumpLaw(HyperExponentialJumps{std::move(weights), std::move(rates)});
  }
  static JumpLaw erlang(int shape, double rate) { return JumpLaw(ErlangJumps{shape, rate}); }

  const Variant& variant() const { return law_; }
  std::string kind() const;

  double mean() const;
  double laplace_transform(double theta) const;
  std::complex<double> laplace_transform(std::complex<double> theta) const;

  // density, tail and stop_loss throw RegimeMismatch for GeneralJumps.
  double density(double x) const;
  /// P(X > x).
  double tail(double x) const;
  /// E[(X - u)^+].
  double stop_loss(double u) const;
  /// Rate of the slowest exponential component; bounds the density tail.
  double tail_decay_rate() const;

  double sample(Rng& rng) const;

  bool has_rational_transform() const;
  RationalTransform rational_transform() const;

  /// Empty when the parameters are admissible, otherwise one message per breach.
  std::vector<std::string> invariant_violations() const;

 private:
  Variant law_;
};

struct ModelParams {
  double p = 0.5;        ///< expense rate
  double sigma_p = 0.0;  ///< surplus volatility
  double lambda = 1.0;   ///< jump intensity
  JumpLaw jump;
  double r = 0.0;        ///< return drift
  double sigma_R = 0.0;  ///< return volatility
  double rho = 0.0;      ///< correlation between the two Brownian drivers
};

struct CostParams {
  double delta = 0.05;  ///< discount rate
  double alpha = 1.0;   ///< dividend retention factor, (0, 1]
  double beta = 1.0;    ///< capital injection cost factor, [1, inf)
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity;
  std::string field;
  std::string message;
};

/// Checks the standing assumptions. Net-profit failure is a warning only.
std::vector<Diagnostic> validate(const ModelParams& model, const CostParams& costs);

/// Throws Error(InvalidParameter) naming the first hard violation.
void require_valid(const ModelParams& model, const CostParams& costs);

struct GeneratorCoefficients {
  double drift;
  double diffusion;
};

/// Drift r y - p and diffusion ½[(σ_p + ρ σ_R y)² + σ_R²(1-ρ²) y²] of the generator at y.
GeneratorCoefficients generator_coefficients(const ModelParams& model, double y);

/// λ E[X] - p, the mean of the uncontrolled surplus increment per unit time when r = 0.
double net_drift(const ModelParams& model);

/// r = σ_R = 0: the surplus is a spectrally positive Lévy process.
bool is_levy_regime(const ModelParams& model);

}  // namespace divctl
