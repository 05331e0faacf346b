#include "divctl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void no_closed_form(const char* what) {
  throw Error(ErrorCode::RegimeMismatch,
              std::string("general jump law has no closed-form ") + what);
}

// e^{-m u} Σ_{j<k} (m u)^j / j!
double erlang_tail(int k, double m, double u) {
  if (u <= 0.0) return 1.0;
  const double mu = m * u;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= mu / j;
    sum += term;
  }
  return std::exp(-mu) * sum;
}

}  // namespace

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
  std::complex<double> acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(static_cast<double>(i) * c[i]);
  if (d.c.empty()) d.c.push_back(0.0);
  return d;
}

Polynomial operator+(const Polynomial& lhs, const Polynomial& rhs) {
  Polynomial out;
  out.c.assign(std::max(lhs.c.size(), rhs.c.size()), 0.0);
  for (std::size_t i = 0; i < lhs.c.size(); ++i) out.c[i] += lhs.c[i];
  for (std::size_t i = 0; i < rhs.c.size(); ++i) out.c[i] += rhs.c[i];
  return out;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  Polynomial out;
  out.c.assign(lhs.c.size() + rhs.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < lhs.c.size(); ++i)
    for (std::size_t j = 0; j < rhs.c.size(); ++j) out.c[i + j] += lhs.c[i] * rhs.c[j];
  return out;
}

Polynomial operator*(double s, const Polynomial& p) {
  Polynomial out = p;
  for (double& v : out.c) v *= s;
  return out;
}

std::string JumpLaw::kind() const {
  return std::visit(Overloaded{
                        [](const ExponentialJumps&) { return std::string("exponential"); },
                        [](const HyperExponentialJumps&) { return std::string("hyperexponential"); },
                        [](const ErlangJumps&) { return std::string("erlang"); },
                        [](const GeneralJumps&) { return std::string("general"); },
                    },
                    law_);
}

double JumpLaw::mean() const {
  return std::visit(Overloaded{
                        [](const ExponentialJumps& e) { return 1.0 / e.rate; },
                        [](const HyperExponentialJumps& h) {
                          double m = 0.0;
                          for (std::size_t i = 0; i < h.weights.size(); ++i) m += h.weights[i] / h.rates[i];
                          return m;
                        },
                        [](const ErlangJumps& e) { return e.shape / e.rate; },
                        [](const GeneralJumps& g) { return g.mean; },
                    },
                    law_);
}

double JumpLaw::laplace_transform(double theta) const {
  return laplace_transform(std::complex<double>(theta, 0.0)).real();
}

std::complex<double> JumpLaw::laplace_transform(std::complex<double> theta) const {
  using C = std::complex<double>;
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& e) { return C(e.rate) / (e.rate + theta); },
                        [&](const HyperExponentialJumps& h) {
                          C acc = 0.0;
                          for (std::size_t i = 0; i < h.weights.size(); ++i)
                            acc += h.weights[i] * h.rates[i] / (h.rates[i] + theta);
                          return acc;
                        },
                        [&](const ErlangJumps& e) { return std::pow(C(e.rate) / (e.rate + theta), e.shape); },
                        [&](const GeneralJumps& g) { return g.laplace(theta); },
                    },
                    law_);
}

double JumpLaw::density(double x) const {
  if (x < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& e) { return e.rate * std::exp(-e.rate * x); },
                        [&](const HyperExponentialJumps& h) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < h.weights.size(); ++i)
                            acc += h.weights[i] * h.rates[i] * std::exp(-h.rates[i] * x);
                          return acc;
                        },
                        [&](const ErlangJumps& e) {
                          const double log_f = e.shape * std::log(e.rate) + (e.shape - 1) * std::log(x) -
                                               e.rate * x - std::lgamma(static_cast<double>(e.shape));
                          return (x == 0.0 && e.shape > 1) ? 0.0 : std::exp(log_f);
                        },
                        [&](const GeneralJumps&) -> double { no_closed_form("density"); },
                    },
                    law_);
}

double JumpLaw::tail(double x) const {
  if (x <= 0.0) return 1.0;
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& e) { return std::exp(-e.rate * x); },
                        [&](const HyperExponentialJumps& h) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < h.weights.size(); ++i)
                            acc += h.weights[i] * std::exp(-h.rates[i] * x);
                          return acc;
                        },
                        [&](const ErlangJumps& e) { return erlang_tail(e.shape, e.rate, x); },
                        [&](const GeneralJumps&) -> double { no_closed_form("tail"); },
                    },
                    law_);
}

double JumpLaw::stop_loss(double u) const {
  if (u <= 0.0) return mean() - u;
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& e) { return std::exp(-e.rate * u) / e.rate; },
                        [&](const HyperExponentialJumps& h) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < h.weights.size(); ++i)
                            acc += h.weights[i] * std::exp(-h.rates[i] * u) / h.rates[i];
                          return acc;
                        },
                        [&](const ErlangJumps& e) {
                          double acc = 0.0;
                          for (int j = 1; j <= e.shape; ++j) acc += erlang_tail(j, e.rate, u);
                          return acc / e.rate;
                        },
                        [&](const GeneralJumps&) -> double { no_closed_form("stop-loss transform"); },
                    },
                    law_);
}

double JumpLaw::tail_decay_rate() const {
  return std::visit(Overloaded{
                        [](const ExponentialJumps& e) { return e.rate; },
                        [](const HyperExponentialJumps& h) {
                          return *std::min_element(h.rates.begin(), h.rates.end());
                        },
                        // Erlang tails carry a polynomial factor; halve the rate to dominate it.
                        [](const ErlangJumps& e) { return e.shape == 1 ? e.rate : 0.5 * e.rate; },
                        [](const GeneralJumps&) -> double { no_closed_form("tail envelope"); },
                    },
                    law_);
}

double JumpLaw::sample(Rng& rng) const {
  return std::visit(Overloaded{
                        [&](const ExponentialJumps& e) {
                          return boost::random::exponential_distribution<double>(e.rate)(rng);
                        },
                        [&](const HyperExponentialJumps& h) {
                          const double u = boost::random::uniform_01<double>()(rng);
                          double acc = 0.0;
                          std::size_t i = 0;
                          for (; i + 1 < h.weights.size(); ++i) {
                            acc += h.weights[i];
                            if (u < acc) break;
                          }
                          return boost::random::exponential_distribution<double>(h.rates[i])(rng);
                        },
                        [&](const ErlangJumps& e) {
                          boost::random::exponential_distribution<double> expo(e.rate);
                          double sum = 0.0;
                          for (int j = 0; j < e.shape; ++j) sum += expo(rng);
                          return sum;
                        },
                        [&](const GeneralJumps& g) { return g.sampler(rng); },
                    },
                    law_);
}

bool JumpLaw::has_rational_transform() const {
  return !std::holds_alternative<GeneralJumps>(law_);
}

RationalTransform JumpLaw::rational_transform() const {
  return std::visit(
      Overloaded{
          [](const ExponentialJumps& e) {
            return RationalTransform{Polynomial{{e.rate}}, Polynomial{{e.rate, 1.0}}};
          },
          [](const HyperExponentialJumps& h) {
            // Merge phases with equal rates so numerator and denominator stay coprime.
            std::vector<double> rates;
            std::vector<double> weights;
            for (std::size_t i = 0; i < h.rates.size(); ++i) {
              auto it = std::find_if(rates.begin(), rates.end(), [&](double q) {
                return std::abs(q - h.rates[i]) <= 1e-12 * q;
              });
              if (it == rates.end()) {
                rates.push_back(h.rates[i]);
                weights.push_back(h.weights[i]);
              } else {
                weights[static_cast<std::size_t>(it - rates.begin())] += h.weights[i];
              }
            }
            Polynomial den{{1.0}};
            for (double q : rates) den = den * Polynomial{{q, 1.0}};
            Polynomial num{{0.0}};
            for (std::size_t i = 0; i < rates.size(); ++i) {
              Polynomial term{{weights[i] * rates[i]}};
              for (std::size_t j = 0; j < rates.size(); ++j)
                if (j != i) term = term * Polynomial{{rates[j], 1.0}};
              num = num + term;
            }
            return RationalTransform{num, den};
          },
          [](const ErlangJumps& e) {
            Polynomial den{{1.0}};
            for (int j = 0; j < e.shape; ++j) den = den * Polynomial{{e.rate, 1.0}};
            return RationalTransform{Polynomial{{std::pow(e.rate, e.shape)}}, den};
          },
          [](const GeneralJumps&) -> RationalTransform { no_closed_form("rational transform"); },
      },
      law_);
}

std::vector<std::string> JumpLaw::invariant_violations() const {
  std::vector<std::string> out;
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  std::visit(Overloaded{
                 [&](const ExponentialJumps& e) {
                   if (!positive(e.rate)) out.push_back("jump.rate must be > 0");
                 },
                 [&](const HyperExponentialJumps& h) {
                   if (h.weights.empty() || h.weights.size() != h.rates.size()) {
                     out.push_back("jump.weights and jump.rates must be non-empty and of equal length");
                     return;
                   }
                   double total = 0.0;
                   for (double w : h.weights) {
                     if (!(w >= 0.0) || !std::isfinite(w)) out.push_back("jump.weights must be >= 0");
                     total += w;
                   }
                   if (std::abs(total - 1.0) > 1e-12) out.push_back("jump.weights must sum to 1");
                   for (double q : h.rates)
                     if (!positive(q)) out.push_back("jump.rates must be > 0");
                 },
                 [&](const ErlangJumps& e) {
                   if (e.shape < 1) out.push_back("jump.shape must be a positive integer");
                   if (!positive(e.rate)) out.push_back("jump.rate must be > 0");
                 },
                 [&](const GeneralJumps& g) {
                   if (!positive(g.mean)) out.push_back("jump mean must be finite and > 0");
                   if (!g.sampler) out.push_back("general jump law needs a sampler");
                 },
             },
             law_);
  return out;
}

std::vector<Diagnostic> validate(const ModelParams& model, const CostParams& costs) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string field, std::string msg) {
    out.push_back({Severity::Error, std::move(field), std::move(msg)});
  };
  auto finite = [](double v) { return std::isfinite(v); };

  if (!finite(model.p) || model.p <= 0.0) error("model.p", "expense rate must be > 0");
  if (!finite(model.sigma_p) || model.sigma_p < 0.0) error("model.sigma_p", "must be >= 0");
  if (!finite(model.lambda) || model.lambda <= 0.0) error("model.lambda", "jump intensity must be > 0");
  if (!finite(model.r) || model.r < 0.0) error("model.r", "must be >= 0");
  if (!finite(model.sigma_R) || model.sigma_R < 0.0) error("model.sigma_R", "must be >= 0");
  if (!finite(model.rho) || model.rho < -1.0 || model.rho > 1.0) error("model.rho", "must lie in [-1, 1]");
  const auto jump_issues = model.jump.invariant_violations();
  for (const auto& msg : jump_issues) error("model.jump", msg);

  if (!finite(costs.delta) || costs.delta <= 0.0) error("costs.delta", "discount rate must be > 0");
  if (!finite(costs.alpha) || costs.alpha <= 0.0 || costs.alpha > 1.0)
    error("costs.alpha", "alpha out of range (0, 1]");
  if (!finite(costs.beta) || costs.beta < 1.0) error("costs.beta", "beta out of range [1, inf)");

  if (jump_issues.empty() && finite(model.lambda) && finite(model.p)) {
    const double mean = model.jump.mean();
    if (!std::isfinite(mean)) {
      error("model.jump", "jump mean must be finite");
    } else if (model.lambda * mean <= model.p) {
      std::ostringstream msg;
      msg << "net-profit condition fails: lambda*E[X] = " << model.lambda * mean << " <= p = " << model.p;
      out.push_back({Severity::Warning, "model.lambda", msg.str()});
    }
  }
  if (finite(model.r) && finite(costs.delta) && model.r > 0.0 && model.r >= costs.delta) {
    out.push_back({Severity::Warning, "model.r",
                   "return drift r >= delta: barrier values are unbounded, only Monte Carlo applies"});
  }
  return out;
}

void require_valid(const ModelParams& model, const CostParams& costs) {
  for (const auto& d : validate(model, costs)) {
    if (d.severity == Severity::Error) throw Error(ErrorCode::InvalidParameter, d.field + ": " + d.message);
  }
}

GeneratorCoefficients generator_coefficients(const ModelParams& model, double y) {
  const double a = model.sigma_p + model.rho * model.sigma_R * y;
  const double b = model.sigma_R * y;
  return {model.r * y - model.p, 0.5 * (a * a + b * b * (1.0 - model.rho * model.rho))};
}

double net_drift(const ModelParams& model) { return model.lambda * model.jump.mean() - model.p; }

bool is_levy_regime(const ModelParams& model) { return model.r == 0.0 && model.sigma_R == 0.0; }

}  // namespace divctl
