#include "divctl/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divctl/errors.hpp"
#include "divctl/numerics.hpp"

namespace divctl {

double generator_residual(const ModelParams& model, const CostParams& costs, const ValueFunction& v, double x) {
  const double b = v.barrier();
  const double alpha = v.alpha();
  const auto gc = generator_coefficients(model, x);
  const double vx = v(x);
  double out = gc.drift * v.derivative(x) - costs.delta * vx;
  if (gc.diffusion > 0.0) out += gc.diffusion * v.second_derivative(x);

  const JumpLaw& law = model.jump;
  const double u = b - x;
  double jump = 0.0;
  try {
    if (u > 0.0) {
      const Tolerance tol{1e-13, 1e-12, 15};
      jump += integrate([&](double y) { return v(x + y) * law.density(y); }, 0.0, u, tol);
    }
    // Above b - x the value is linear: V(b) + α(x + y - b).
    jump += v(b) * law.tail(u) + alpha * law.stop_loss(u);
  } catch (const Error& e) {
    throw Error(ErrorCode::QuadratureFailure, std::string("jump integral at x = ") + std::to_string(x) + ": " + e.what());
  }
  return out + model.lambda * (jump - vx);
}

bool ResidualReport::passed(double equality_tol, double inequality_tol) const {
  return max_equality < equality_tol && max_generator_excess <= inequality_tol && max_lower_slope <= inequality_tol &&
         max_upper_slope <= inequality_tol && max_above_slope <= inequality_tol && smooth_fit_first < equality_tol &&
         (std::isnan(smooth_fit_second) || smooth_fit_second < equality_tol) && boundary_error < equality_tol;
}

ResidualReport hjb_residual(const ModelParams& model, const CostParams& costs, const ValueFunction& v,
                            const std::vector<double>& grid, Boundary boundary, std::optional<double> beta) {
  ResidualReport r;
  const double b = v.barrier();
  const double alpha = v.alpha();
  r.barrier = b;
  r.hjb_max = -std::numeric_limits<double>::infinity();
  for (double x : grid) {
    ResidualPoint pt{x, v(x), v.derivative(x), generator_residual(model, costs, v, x)};
    r.points.push_back(pt);
    if (x <= b) {
      r.max_equality = std::max(r.max_equality, std::abs(pt.generator));
    } else {
      r.max_generator_excess = std::max(r.max_generator_excess, pt.generator);
      r.max_above_slope = std::max(r.max_above_slope, std::abs(pt.derivative - alpha));
    }
    r.max_lower_slope = std::max(r.max_lower_slope, alpha - pt.derivative);
    double branch = std::max(pt.generator, alpha - pt.derivative);
    if (beta) {
      r.max_upper_slope = std::max(r.max_upper_slope, pt.derivative - *beta);
      branch = std::max(branch, pt.derivative - *beta);
    }
    r.hjb_max = std::max(r.hjb_max, branch);
  }
  r.smooth_fit_first = b > 0.0 ? std::abs(v.derivative(b) - alpha) : 0.0;
  r.smooth_fit_second = (b > 0.0 && is_levy_regime(model) && model.sigma_p > 0.0)
                            ? std::abs(v.second_derivative(b))
                            : std::numeric_limits<double>::quiet_NaN();
  if (boundary == Boundary::ZeroValue) {
    r.boundary_error = std::abs(v(0.0));
  } else {
    r.boundary_error = beta ? std::abs(v.derivative(0.0) - *beta) : 0.0;
  }
  return r;
}

std::vector<double> default_grid(double hi, int n) {
  std::vector<double> g;
  for (int i = 1; i <= n; ++i) g.push_back(hi * i / n);
  return g;
}

std::vector<CheckRow> residual_rows(const ResidualReport& r, bool upper_slope, double equality_tol,
                                    double inequality_tol) {
  std::vector<CheckRow> rows;
  auto add = [&](std::string name, double value, double tol, bool strict) {
    rows.push_back({std::move(name), value, tol, strict ? value < tol : value <= tol});
  };
  add("|(L-delta)V| on (0,b]", r.max_equality, equality_tol, true);
  add("(L-delta)V above b", r.max_generator_excess, inequality_tol, false);
  add("alpha - V'", r.max_lower_slope, inequality_tol, false);
  if (upper_slope) add("V' - beta", r.max_upper_slope, inequality_tol, false);
  add("|V' - alpha| above b", r.max_above_slope, inequality_tol, false);
  add("smooth fit |V'(b-) - alpha|", r.smooth_fit_first, equality_tol, true);
  if (!std::isnan(r.smooth_fit_second)) add("smooth fit |V''(b-)|", r.smooth_fit_second, equality_tol, true);
  add(upper_slope ? "boundary |V'(0) - beta|" : "boundary |V(0)|", r.boundary_error, equality_tol, true);
  return rows;
}

}  // namespace divctl
