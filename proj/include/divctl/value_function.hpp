#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "divctl/kummer.hpp"
#include "divctl/scale.hpp"

namespace divctl {

enum class Regime { Degenerate, ScaleForm, KummerForm, MonteCarlo };

std::string_view to_string(Regime regime);

/// V(x) = αx: pay everything at once.
struct LinearValue {
  double alpha;
};

/// V(x) = α(c - Z̄(b - x) + K Z(b - x)) on [0, b], c = (λE[X] - p)/δ.
/// K = 0 at the optimal barrier of either problem.
struct ScaleValue {
  std::shared_ptr<const ScaleSet> scale;
  double alpha;
  double barrier;
  double c;
  double K;
};

/// V(x) = k1 y1(x) + k2 y2(x) on [0, b] in the basis of KummerBasis.
struct KummerValue {
  std::shared_ptr<const KummerBasis> basis;
  double alpha;
  double barrier;
  double k1;
  double k2;
};

/// Piecewise-linear interpolation of Monte Carlo estimates on [0, b].
struct MonteCarloValue {
  double alpha;
  double barrier;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std_err;
};

/// Barrier-type value function: closed form on [0, b], slope α above b.
class ValueFunction {
 public:
  using Variant = std::variant<LinearValue, ScaleValue, KummerValue, MonteCarloValue>;

  ValueFunction() : v_(LinearValue{1.0}) {}
  explicit ValueFunction(Variant v) : v_(std::move(v)) {}

  const Variant& variant() const { return v_; }
  double barrier() const;
  double alpha() const;

  double operator()(double x) const;
  /// Left derivative at the barrier, α above it.
  double derivative(double x) const;
  /// Left second derivative at the barrier, 0 above it.
  double second_derivative(double x) const;

 private:
  double inner(double x) const;
  double inner_prime(double x) const;
  double inner_second(double x) const;

  Variant v_;
};

/// Barrier-b value for dividends only, pinned by V(0) = 0.
ValueFunction scale_dividend_value(std::shared_ptr<const ScaleSet> scale, double alpha, double b);
/// Barrier-B value with reflection at 0, pinned by V'(0) = β.
ValueFunction scale_injection_value(std::shared_ptr<const ScaleSet> scale, double alpha, double beta, double B);

}  // namespace divctl
