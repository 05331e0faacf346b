#include "divctl/value_function.hpp"

#include <algorithm>
#include <cmath>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double scale_c(const ScaleSet& s) { return net_drift(s.model()) / s.delta(); }

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Degenerate: return "Degenerate";
    case Regime::ScaleForm: return "ScaleForm";
    case Regime::KummerForm: return "KummerForm";
    case Regime::MonteCarlo: return "MonteCarlo";
  }
  return "Unknown";
}

double ValueFunction::barrier() const {
  return std::visit(Overloaded{[](const LinearValue&) { return 0.0; }, [](const auto& v) { return v.barrier; }}, v_);
}

double ValueFunction::alpha() const {
  return std::visit([](const auto& v) { return v.alpha; }, v_);
}

double ValueFunction::inner(double x) const {
  return std::visit(
      Overloaded{
          [&](const LinearValue& v) { return v.alpha * x; },
          [&](const ScaleValue& v) {
            const double y = v.barrier - x;
            return v.alpha * (v.c - v.scale->Zbar(y) + v.K * v.scale->Z(y));
          },
          [&](const KummerValue& v) { return v.k1 * v.basis->y1(x) + v.k2 * v.basis->y2(x); },
          [&](const MonteCarloValue& v) {
            if (v.x.size() == 1) return v.mean.front();
            auto it = std::upper_bound(v.x.begin(), v.x.end(), x);
            std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - v.x.begin(), 1,
                                                                                static_cast<std::ptrdiff_t>(v.x.size()) - 1));
            const double w = (x - v.x[i - 1]) / (v.x[i] - v.x[i - 1]);
            return (1.0 - w) * v.mean[i - 1] + w * v.mean[i];
          },
      },
      v_);
}

double ValueFunction::inner_prime(double x) const {
  return std::visit(
      Overloaded{
          [&](const LinearValue& v) { return v.alpha; },
          [&](const ScaleValue& v) {
            const double y = v.barrier - x;
            const auto& s = *v.scale;
            return v.alpha * (s.Z(y) - v.K * s.delta() * s.W(y));
          },
          [&](const KummerValue& v) { return v.k1 * v.basis->y1_prime(x) + v.k2 * v.basis->y2_prime(x); },
          [&](const MonteCarloValue& v) {
            if (v.x.size() == 1) return v.alpha;
            auto it = std::upper_bound(v.x.begin(), v.x.end(), x);
            std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - v.x.begin(), 1,
                                                                                static_cast<std::ptrdiff_t>(v.x.size()) - 1));
            return (v.mean[i] - v.mean[i - 1]) / (v.x[i] - v.x[i - 1]);
          },
      },
      v_);
}

double ValueFunction::inner_second(double x) const {
  return std::visit(
      Overloaded{
          [&](const LinearValue&) { return 0.0; },
          [&](const ScaleValue& v) {
            const double y = v.barrier - x;
            const auto& s = *v.scale;
            return v.alpha * s.delta() * (-s.W(y) + v.K * s.W_prime(y));
          },
          [&](const KummerValue& v) {
            // Central difference of the exact first derivative.
            const double h = 1e-5 * std::max(1.0, v.barrier);
            const double lo = std::max(0.0, x - h);
            const double hi = std::min(v.barrier, x + h);
            if (hi <= lo) return 0.0;
            return (inner_prime(hi) - inner_prime(lo)) / (hi - lo);
          },
          [&](const MonteCarloValue&) { return 0.0; },
      },
      v_);
}

double ValueFunction::operator()(double x) const {
  const double b = barrier();
  if (x <= b) return inner(x);
  return inner(b) + alpha() * (x - b);
}

double ValueFunction::derivative(double x) const {
  if (x > barrier()) return alpha();
  return inner_prime(x);
}

double ValueFunction::second_derivative(double x) const {
  if (x > barrier()) return 0.0;
  return inner_second(x);
}

ValueFunction scale_dividend_value(std::shared_ptr<const ScaleSet> scale, double alpha, double b) {
  const double c = scale_c(*scale);
  const double K = (scale->Zbar(b) - c) / scale->Z(b);
  return ValueFunction(ScaleValue{std::move(scale), alpha, b, c, K});
}

ValueFunction scale_injection_value(std::shared_ptr<const ScaleSet> scale, double alpha, double beta, double B) {
  const double c = scale_c(*scale);
  double K = 0.0;
  const double target = scale->Z(B) - beta / alpha;
  if (target != 0.0) {
    const double w = scale->W(B);
    if (!(w > 0.0))
      throw Error(ErrorCode::InvalidParameter, "injection barrier off the optimum needs W(B) > 0");
    K = target / (scale->delta() * w);
  }
  return ValueFunction(ScaleValue{std::move(scale), alpha, B, c, K});
}

}  // namespace divctl
