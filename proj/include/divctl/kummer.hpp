#pragma once

namespace divctl {

/// Parameters of Kummer's equation z f'' + (b - z) f' - a f = 0.
struct KummerParams {
  double a;
  double b;

  /// Throws ParameterPole when b is a non-positive integer.
  static KummerParams make(double a, double b);
};

/// M(a, b, z) = Σ (a)_n/(b)_n zⁿ/n!. Throws ParameterPole or NonConvergence.
double kummer_M(double a, double b, double z);
/// (a/b) M(a+1, b+1, z).
double kummer_M_prime(double a, double b, double z);

/// Principal U(a, b, z) for z > 0. Throws BranchDomain for z ≤ 0.
double kummer_U(double a, double b, double z);
/// -a U(a+1, b+1, z).
double kummer_U_prime(double a, double b, double z);

/// Real second solution on z < 0: Re U(a, b, z + i0), i.e.
/// Γ(1-b)/Γ(a+1-b) M(a,b,z) + cos(π(1-b)) Γ(b-1)/Γ(a) (-z)^{1-b} M(a-b+1, 2-b, z).
/// Satisfies the same shift rule f' = -a f(a+1, b+1).
double kummer_U_negative(double a, double b, double z);
double kummer_U_negative_prime(double a, double b, double z);

/// (-z)^{1-b} M(a-b+1, 2-b, z) for z < 0, scaled by (-z_ref)^{b-1} to stay finite.
double kummer_regular(double a, double b, double z, double z_ref = -1.0);
double kummer_regular_prime(double a, double b, double z, double z_ref = -1.0);

/// Solutions of the ODE in the surplus variable x, with z = mu (x - x_root) < 0.
/// Basis y1 = Re U, y2 = regular solution normalised at x = 0.
class KummerBasis {
 public:
  KummerBasis(double a, double b, double mu, double x_root);

  double a() const { return a_; }
  double b() const { return b_; }
  double z(double x) const { return mu_ * (x - x_root_); }

  double y1(double x) const;
  double y1_prime(double x) const;
  double y2(double x) const;
  double y2_prime(double x) const;

  // Classical pair {M, Re U} and x-derivatives.
  double M(double x) const;
  double M_prime(double x) const;
  double U(double x) const { return y1(x); }
  double U_prime(double x) const { return y1_prime(x); }

 private:
  double a_, b_, mu_, x_root_, z_ref_;
};

}  // namespace divctl
