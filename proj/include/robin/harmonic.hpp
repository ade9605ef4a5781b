#pragma once

#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "robin/fem.hpp"
#include "robin/report.hpp"

namespace robin {

/// Fundamental-solution constant of the planar Dirichlet Green's function,
/// G(x, y) = green_gamma (-ln|x - y| - H(x, y)).
inline constexpr double green_gamma = 1.0 / (2.0 * std::numbers::pi);

/// Dirichlet Green's function of a meshed planar domain for one pole.
struct GreenData {
  const Mesh* mesh = nullptr;
  Point pole = Point::Zero();
  ScalarField regular_part;  // H(., y): harmonic, equal to -ln|x - y| on the boundary
  ScalarField green;         // G = green_gamma (-ln|x - y| - H); zero on the boundary
  double harmonic_radius_at_pole = 0.0;  // exp(-H(y, y))
  int pole_node = -1;        // node coinciding with the pole, if any
};

/// Builds the Green's function for pole y. If y coincides with a node, that
/// node's value uses the distance of the nearest other node in place of zero.
/// Throws PreconditionError if y lies within 2h of the boundary.
GreenData green_function(const Mesh& mesh, const Point& y);
GreenData green_function(const Mesh& mesh, const DirichletSolver& solver, const Point& y);

/// Harmonic radius exp(-H(y, y)) at an interior point.
double harmonic_radius(const Mesh& mesh, const DirichletSolver& solver, const Point& y);

/// Distance from p to the boundary polygon of the mesh.
double boundary_distance(const Mesh& mesh, const Point& p);

struct HarmonicCenter {
  Point center = Point::Zero();
  double radius = 0.0;  // r_Omega
  int evaluations = 0;
};

/// Maximizes the harmonic radius: coarse scan over interior nodes deeper than 2h,
/// then Nelder-Mead refinement to a simplex diameter of 1e-6.
HarmonicCenter harmonic_center(const Mesh& mesh);
HarmonicCenter harmonic_center(const Mesh& mesh, const DirichletSolver& solver);

/// Superlevel-set measures of G(., y_h) against the comparison disk B_{r_Omega}.
struct LevelSetTable {
  std::vector<double> t;
  std::vector<double> m_omega;  // |{G > t}|, exact for the P1 field
  std::vector<double> m_ball;   // pi r_t^2, r_t = r_Omega e^{-2 pi t}
  double gamma_ratio = 1.0;     // (|Omega| / |B_{r_Omega}|)^{1/2}
  double r_omega = 0.0;
  double domain_area = 0.0;
  double h = 0.0;
  double perimeter = 0.0;
};

/// Area of {x in Omega : field(x) > t} for a P1 field, by exact per-triangle clipping.
double superlevel_area(const ScalarField& field, double t);

LevelSetTable level_set_measures(const GreenData& green, std::span<const double> t_grid);

struct CapacityCheck {
  double t = 0.0;
  double cap_domain = 0.0;  // t^-2 int_{G <= t} |grad G|^2
  double cap_ball = 0.0;    // 2 pi / ln(r_Omega / r_t)
  double relative_gap = 0.0;
};

/// Throws RangeError if the superlevel set {G > t} covers fewer than ten elements' area.
CapacityCheck verify_capacity_equality(const GreenData& green, double t);

struct Lemma2Row {
  double t = 0.0;
  double m_omega = 0.0;
  double bound = 0.0;         // gamma_ratio^2 m_ball
  double strict_margin = 0.0; // bound - m_omega
  double margin = 0.0;        // bound + eps_h - m_omega
};

struct Lemma2Report {
  double eps_h = 0.0;  // 10 h |dOmega|
  std::vector<Lemma2Row> rows;
  double worst_margin = 0.0;
  double worst_strict_margin = 0.0;
  bool passed = true;
};

Lemma2Report verify_lemma_cap2(const LevelSetTable& table);

/// Radial function on [0, radius] with its derivative.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double radius = 0.0;
};

/// int_{B_R} f(phi) dx = 2 pi int_0^R f(phi(rho)) rho drho.
double ball_integral(const RadialProfile& phi, const std::function<double(double)>& f);
/// int_{B_R} |grad phi|^2 dx.
double ball_dirichlet_energy(const RadialProfile& phi);

/// U(x) = phi(r_Omega exp(-2 pi G(x, y_h))); boundary nodes take phi(r_Omega).
ScalarField transplant(const RadialProfile& phi, const GreenData& green, double r_omega);

struct TransplantBoundsReport {
  double ball_integral = 0.0;    // int_B f(phi)
  double domain_integral = 0.0;  // int_Omega f(U)
  double upper_bound = 0.0;      // gamma_ratio^2 int_B f(phi)
  double epsilon = 0.0;
  double lower_margin = 0.0;     // domain - ball + eps
  double upper_margin = 0.0;     // upper + eps - domain
  bool passed = false;
};

/// Two-sided check int_B f(phi) - eps <= int_Omega f(U) <= gamma^2 int_B f(phi) + eps with
/// eps = 0.2 h |Omega| max f(phi). Throws PreconditionError if phi is not increasing or f is
/// not positive and increasing on the range of phi.
TransplantBoundsReport verify_transplant_bounds(const RadialProfile& phi, const GreenData& green, double r_omega,
                                                double gamma_ratio, const std::function<double(double)>& f);

/// Allowance for eigenvalue-product comparisons: 0.2 h |reference|.
double eigen_mesh_allowance(double h, double reference);

/// Full check of |Omega| lambda(Omega) <= |B_{r_Omega}| lambda(B_{r_Omega}) together with the
/// constant-trial bound, the equal-area ball comparison, and the transplanted Rayleigh quotient.
ExperimentReport theorem1_check(const DomainSpec& spec, double alpha, double h);

}  // namespace robin
