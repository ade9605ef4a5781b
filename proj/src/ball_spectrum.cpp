#include "robin/ball_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "robin/error.hpp"

namespace robin {

namespace {

constexpr double kShootStart = 1e-4;

// Gamma(nu+1) (2/z)^nu I_nu(z) e^{-z} without overflow: ratio of the radial
// profile to its value at the origin, scaled by e^{-z}.
double normalized_radial_scaled(double nu, double z, bool plus_one) {
  const BesselOrder ord(plus_one ? nu + 1.0 : nu);
  const double log_pref = std::lgamma(nu + 1.0) + nu * std::log(2.0 / z);
  return std::exp(log_pref) * bessel_i_scaled(ord, z);
}

}  // namespace

void BallProblem::validate() const {
  if (n < 2) throw PreconditionError("BallProblem: n must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("BallProblem: alpha must be > 0");
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("BallProblem: r must be > 0");
}

double BallProblem::boundary_coefficient() const { return alpha + (n - 2) / (2.0 * r); }

double BallEigenResult::curvature_combination() const {
  const auto& p = problem;
  return lambda + p.alpha * p.alpha + p.alpha * (p.n - 1) / p.r;
}

double BallEigenResult::profile(double rho) const {
  if (rho <= 0.0) return 1.0;
  const double nu = 0.5 * (problem.n - 2);
  const double z = k * rho;
  return normalized_radial_scaled(nu, z, false) * std::exp(z);
}

double BallEigenResult::profile_derivative(double rho) const {
  if (rho <= 0.0) return 0.0;
  // (z^-nu I_nu)' = z^-nu I_{nu+1}
  const double nu = 0.5 * (problem.n - 2);
  const double z = k * rho;
  return k * normalized_radial_scaled(nu, z, true) * std::exp(z);
}

double ball_characteristic(const BallProblem& p, double k) {
  const double z = k * p.r;
  return k * bessel_i_log_derivative(p.order(), z) - p.boundary_coefficient();
}

BallEigenResult ball_eigenvalue(const BallProblem& p) {
  p.validate();
  const double c = p.boundary_coefficient();
  double lo = 1e-8 / p.r;
  double hi = c + 1.0 / p.r;
  int doublings = 0;
  while (ball_characteristic(p, hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) throw ConvergenceError("ball_eigenvalue: bracket expansion exceeded 60 doublings");
  }
  const double scan_hi = hi;
  if (ball_characteristic(p, lo) >= 0.0) throw ConvergenceError("ball_eigenvalue: no sign change in bracket");

  for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ball_characteristic(p, mid) > 0.0) hi = mid;
    else lo = mid;
  }
  const double flo = ball_characteristic(p, lo);
  const double fhi = ball_characteristic(p, hi);
  const double k = std::abs(flo) < std::abs(fhi) ? lo : hi;

  BallEigenResult res;
  res.problem = p;
  res.k = k;
  res.lambda = -k * k;
  res.residual = ball_characteristic(p, k);

  int changes = 0;
  double prev = ball_characteristic(p, 1e-8 / p.r);
  for (int i = 1; i <= 64; ++i) {
    const double f = ball_characteristic(p, scan_hi * i / 64.0);
    if ((f > 0.0) != (prev > 0.0)) ++changes;
    prev = f;
  }
  res.sign_changes = changes;

  res.u_boundary = res.profile(p.r);
  auto integrand = [&](double rho) {
    const double u = res.profile(rho);
    return u * u * std::pow(rho, p.n - 1);
  };
  res.l2_norm_sq = unit_sphere_area(p.n) *
                   boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, p.r, 12, 1e-14);
  return res;
}

double radial_shooting_oracle(const BallProblem& p, double lambda_trial, int steps) {
  p.validate();
  if (!(lambda_trial < 0.0)) throw PreconditionError("radial_shooting_oracle: lambda_trial must be < 0");
  if (steps < 1) throw PreconditionError("radial_shooting_oracle: steps must be positive");
  const double a = -lambda_trial;
  const double nm1 = p.n - 1.0;
  // y = (u, u')
  auto rhs = [&](double rho, double u, double du, double& fu, double& fdu) {
    fu = du;
    fdu = -nm1 / rho * du + a * u;
  };
  double rho = kShootStart;
  double u = 1.0 + a * rho * rho / (2.0 * p.n);
  double du = a * rho / p.n;
  const double h = (p.r - kShootStart) / steps;
  for (int i = 0; i < steps; ++i) {
    double k1u, k1d, k2u, k2d, k3u, k3d, k4u, k4d;
    rhs(rho, u, du, k1u, k1d);
    rhs(rho + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1d, k2u, k2d);
    rhs(rho + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2d, k3u, k3d);
    rhs(rho + h, u + h * k3u, du + h * k3d, k4u, k4d);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    rho = kShootStart + (i + 1) * h;
  }
  return du - p.alpha * u;
}

double shooting_eigenvalue(const BallProblem& p, int steps) {
  p.validate();
  // residual < 0 while lambda sits above the eigenvalue (k too small).
  auto residual = [&](double k) { return radial_shooting_oracle(p, -k * k, steps); };
  double lo = 1e-6;
  double hi = p.alpha + (p.n - 1.0) / p.r + 1.0;
  int doublings = 0;
  while (residual(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) throw ConvergenceError("shooting_eigenvalue: bracket expansion failed");
  }
  for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  const double k = 0.5 * (lo + hi);
  return -k * k;
}

BallMonotonicityReport ball_monotonicity_check(int n, double alpha, std::span<const double> radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw PreconditionError("ball_monotonicity_check: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw PreconditionError("ball_monotonicity_check: radii must be strictly increasing");
  }
  BallMonotonicityReport rep;
  rep.n = n;
  rep.alpha = alpha;
  for (double r : radii) {
    const auto res = ball_eigenvalue(BallProblem{n, alpha, r});
    rep.rows.push_back({r, res.lambda, res.k, std::pow(r, 0.5 * n) * res.k});
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.lambda_increasing = rep.lambda_increasing && rep.rows[i].lambda > rep.rows[i - 1].lambda;
    rep.y_increasing = rep.y_increasing && rep.rows[i].y > rep.rows[i - 1].y;
  }
  for (std::size_t i = 2; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 2];
    const auto& b = rep.rows[i - 1];
    const auto& c = rep.rows[i];
    const double s0 = (b.y - a.y) / (b.r - a.r);
    const double s1 = (c.y - b.y) / (c.r - b.r);
    rep.y_slope_increasing = rep.y_slope_increasing && s1 > s0;
  }
  return rep;
}

double ball_shape_derivative_closed_form(const BallEigenResult& res, double flux) {
  return -res.curvature_combination() * res.normalized_boundary_value_sq() * flux;
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n, double r) { return unit_sphere_area(n) * std::pow(r, n) / n; }

}  // namespace robin
