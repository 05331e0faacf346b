// Scale-function Laplace identity: ∫ e^{-θx} W(x) dx = 1/(Ψ(θ) - δ) for θ > Φ(δ).
#include <boost/math/quadrature/exp_sinh.hpp>

#include "divctl/scale.hpp"
#include "oracles.hpp"

int main() {
  oracle::Report report(1);
  struct Case {
    const char* name;
    double sigma;
    std::vector<double> weights, rates;
  };
  const std::vector<Case> cases = {
      {"sigma=0.1 Exp(1)", 0.1, {1.0}, {1.0}},
      {"sigma=0.2 HyperExp(0.4/0.5, 0.6/3)", 0.2, {0.4, 0.6}, {0.5, 3.0}},
      {"sigma=0.5 HyperExp(0.7/1, 0.3/4)", 0.5, {0.7, 0.3}, {1.0, 4.0}},
  };
  const double delta = 0.05;
  boost::math::quadrature::exp_sinh<double> integrator;

  for (const auto& c : cases) {
    divctl::ModelParams m = oracle::scale_model(c.sigma);
    m.jump = c.rates.size() == 1 ? divctl::JumpLaw::exponential(c.rates[0])
                                 : divctl::JumpLaw::hyper_exponential(c.weights, c.rates);
    const auto s = divctl::ScaleSet::build(m, delta);
    const double phi_resid = oracle::psi(m.p, c.sigma, m.lambda, c.weights, c.rates, s.phi()) - delta;
    report.check(std::abs(phi_resid) < 1e-10, std::string(c.name) + ": Psi(Phi) = delta, residual " +
                                                  oracle::fmt("%.2e", phi_resid));
    for (double gap : {0.5, 1.0, 5.0}) {
      const double theta = s.phi() + gap;
      // W grows like e^{Phi x} and overflows past Phi x = 700, where the
      // integrand, of order e^{-gap x}, is already below 1e-130.
      const double lhs = integrator.integrate(
          [&](double x) { return s.phi() * x > 700.0 ? 0.0 : std::exp(-theta * x) * s.W(x); }, 1e-14);
      const double rhs = 1.0 / (oracle::psi(m.p, c.sigma, m.lambda, c.weights, c.rates, theta) - delta);
      const double rel = std::abs(lhs - rhs) / std::abs(rhs);
      report.check(rel < 1e-6, std::string(c.name) +
                                   oracle::fmt(": theta = Phi + %.1f, quadrature %.12g vs 1/(Psi - delta) %.12g, rel %.2e",
                                               gap, lhs, rhs, rel));
    }
  }
  return report.finish(10.0);
}
