#pragma once

#include <span>
#include <vector>

#include "robin/bessel.hpp"

namespace robin {

/// Robin eigenvalue problem  Delta u + lambda u = 0  in B_r subset R^n,
/// du/dnu = alpha u on the sphere.
struct BallProblem {
  int n = 2;
  double alpha = 1.0;
  double r = 1.0;

  void validate() const;
  BesselOrder order() const { return BesselOrder::for_dimension(n); }
  /// alpha + (n - 2) / (2 r): right-hand coefficient of the characteristic equation.
  double boundary_coefficient() const;
};

struct BallEigenResult {
  BallProblem problem;
  double lambda = 0.0;      // principal eigenvalue, < 0
  double k = 0.0;           // sqrt(-lambda)
  double u_boundary = 0.0;  // u(r) for the radial eigenfunction normalized by u(0) = 1
  double l2_norm_sq = 0.0;  // int_{B_r} u^2 dx under the same normalization
  double residual = 0.0;    // k I'_nu(kr)/I_nu(kr) - (alpha + (n-2)/(2r)) at the returned k
  int sign_changes = 1;     // sign changes of the characteristic function on a 64-point scan

  /// lambda + alpha^2 + alpha (n-1)/r; negative for every principal pair.
  double curvature_combination() const;
  /// u(r)^2 / int u^2: boundary value of the L2-normalized eigenfunction, squared.
  double normalized_boundary_value_sq() const { return u_boundary * u_boundary / l2_norm_sq; }
  /// Radial profile u(rho) with u(0) = 1, valid on [0, r].
  double profile(double rho) const;
  /// u'(rho) for the same normalization.
  double profile_derivative(double rho) const;
};

/// Characteristic function in ratio form,
///   F(k) = k I'_nu(kr) / I_nu(kr) - (alpha + (n-2)/(2r)),
/// whose unique positive root is sqrt(-lambda(B_r)).
double ball_characteristic(const BallProblem& p, double k);

/// Principal eigenvalue by bisection on an expanding bracket.
/// Throws ConvergenceError if the bracket cannot be closed in 60 doublings.
BallEigenResult ball_eigenvalue(const BallProblem& p);

/// Integrates the radial ODE u'' + (n-1)/rho u' + lambda u = 0 from rho0 = 1e-4
/// (two-term series start, u(0) = 1) to r with classical RK4 and returns
/// u'(r) - alpha u(r).
double radial_shooting_oracle(const BallProblem& p, double lambda_trial, int steps = 4096);

/// Eigenvalue located by bisection on the sign of radial_shooting_oracle.
double shooting_eigenvalue(const BallProblem& p, int steps = 4096);

struct BallMonotonicityRow {
  double r = 0.0;
  double lambda = 0.0;
  double sqrt_abs_lambda = 0.0;
  double y = 0.0;  // r^{n/2} sqrt|lambda(B_r)|
};

struct BallMonotonicityReport {
  int n = 2;
  double alpha = 1.0;
  std::vector<BallMonotonicityRow> rows;
  bool lambda_increasing = true;
  bool y_increasing = true;
  // Observational only: whether the discrete slope of y is itself increasing.
  bool y_slope_increasing = true;
  bool passed() const { return lambda_increasing && y_increasing; }
};

/// Checks lambda(B_r) and r^{n/2} sqrt|lambda(B_r)| for strict growth along
/// an increasing radius sequence.
BallMonotonicityReport ball_monotonicity_check(int n, double alpha, std::span<const double> radii);

/// -(lambda + alpha^2 + alpha (n-1)/r) u(r)^2 * flux with u normalized in L2(B_r);
/// flux is the integral of v.nu over the sphere.
double ball_shape_derivative_closed_form(const BallEigenResult& res, double flux);

/// Surface measure of the unit sphere in R^n.
double unit_sphere_area(int n);
/// Volume of B_r in R^n.
double ball_volume(int n, double r);

}  // namespace robin
