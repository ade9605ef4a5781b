#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "robin/ball_spectrum.hpp"
#include "robin/fem.hpp"
#include "robin/report.hpp"
#include "robin/steklov.hpp"

namespace robin {

/// Radial boundary perturbation r_t(theta) = r(theta) + t rho_hat(theta) of a star domain.
struct PerturbationField {
  FourierSeries rho_hat;
  double t_max = 0.0;  // perturbed radius stays above half the base minimum for |t| <= t_max

  /// Throws PreconditionError for non-star domains or an empty series.
  static PerturbationField make(const DomainSpec& spec, FourierSeries rho_hat);
  double amplitude(double theta) const { return rho_hat.value(theta); }
};

/// Analytic boundary data at the boundary nodes of a star-domain mesh, in boundary-loop order.
struct BoundaryGeometry {
  std::vector<double> theta;
  std::vector<Point> normal;
  std::vector<double> curvature;
  std::vector<double> radial_normal;  // e_r . nu
  std::vector<double> weight;         // half the exact arc length to each neighbour
  std::vector<double> arc;            // exact arc length from the first node

  double length() const;
};

BoundaryGeometry boundary_geometry(const Mesh& mesh, const DomainSpec& spec);

/// v . nu at each boundary node for the radial field v = rho_hat(theta) e_r.
std::vector<double> normal_velocity(const BoundaryGeometry& geom, const PerturbationField& pert);

/// oint (v . nu) dS.
double volume_flux(const BoundaryGeometry& geom, const PerturbationField& pert);

/// Tangential derivative of boundary nodal values by nonuniform central differences in arc length.
std::vector<double> tangential_derivative(const BoundaryGeometry& geom, const Vector& trace);

/// oint (|grad_tau u|^2 - (lambda + alpha^2 + alpha kappa) u^2) (v . nu) dS, which is the
/// boundary integrand |grad u|^2 - lambda u^2 - 2 alpha^2 u^2 - alpha kappa u^2 with the
/// Robin condition substituted for the normal derivative.
double eigen_shape_derivative(const Mesh& mesh, const BoundaryGeometry& geom, double alpha, const EigenResult& eig,
                              const PerturbationField& pert);

/// First variation of the boundary-forced energy with three readings of the curvature term:
///   printed:  + 2 kappa mu
///   scaled:   + 2 kappa mu u rho
///   hadamard: - 2 kappa mu u rho  (transport theorem for the boundary integral)
struct SteklovVariation {
  double printed = 0.0;
  double scaled = 0.0;
  double hadamard = 0.0;
};

SteklovVariation steklov_first_variation(const Mesh& mesh, const BoundaryGeometry& geom, const ScalarField& u,
                                         const Nonlinearity& G, double mu, const BoundaryWeight& rho,
                                         const PerturbationField& pert);

/// Star spec with boundary r(theta) + t rho_hat(theta). Throws RangeError when |t| > t_max.
DomainSpec perturbed_spec(const DomainSpec& spec, const PerturbationField& pert, double t);

/// Difference quotients of F at 0 for each step: forward (F(t) - F(0)) / t, with a remainder
/// of first order, and central (F(t) - F(-t)) / 2t, of second order. extrapolated is the
/// Richardson extrapolation of the central quotients at the last two steps.
struct FiniteDifferenceStudy {
  double base = 0.0;
  std::vector<double> steps;
  std::vector<double> plus;
  std::vector<double> minus;
  std::vector<double> forward;
  std::vector<double> central;
  double extrapolated = 0.0;
};

FiniteDifferenceStudy central_difference_study(const std::function<double(double)>& F, std::span<const double> steps);

/// lambda_h(Omega_t) on the base mesh radially stretched onto Omega_t.
double perturbed_eigenvalue(const Mesh& base, const DomainSpec& spec, const PerturbationField& pert, double alpha,
                            double t);
/// Minimum discrete energy on the stretched mesh of Omega_t.
double perturbed_energy(const Mesh& base, const DomainSpec& spec, const PerturbationField& pert,
                        const Nonlinearity& G, double mu, const BoundaryWeight& rho, double t);

/// Boundary formula for the eigenvalue derivative against finite differences with steps {1e-2, 5e-3}.
ExperimentReport eigen_derivative_check(const DomainSpec& spec, double alpha, double h, const PerturbationField& pert);

/// Closed-form ball derivative for a uniform dilation against central differences of the ball solver.
ExperimentReport ball_derivative_check(int n, double alpha, double R);

/// All readings of the energy first variation against finite differences; names the reading(s)
/// within 2% of the extrapolated difference quotient.
ExperimentReport steklov_variation_check(const DomainSpec& spec, const Nonlinearity& G, double mu,
                                         const BoundaryWeight& rho, double h, const PerturbationField& pert);

}  // namespace robin
