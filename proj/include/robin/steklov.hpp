#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "robin/fem.hpp"
#include "robin/harmonic.hpp"
#include "robin/report.hpp"

namespace robin {

/// Volume nonlinearity G of the energy  int |grad v|^2 - 2 int G(v) - 2 mu oint v rho.
struct Nonlinearity {
  enum class Kind { affine, quadratic_sink, concave_smooth };

  Kind kind = Kind::quadratic_sink;
  double k = 0.0;       // affine slope; linear source term for quadratic_sink
  double c = 1.0;       // quadratic_sink: G(s) = k s - c^2 s^2 / 2
  double kappa = 1.0;   // concave_smooth: G(s) = kappa (1 - e^{-s}) + kappa0
  double kappa0 = 0.0;

  static Nonlinearity affine(double k);
  static Nonlinearity quadratic_sink(double c, double k = 0.0);
  static Nonlinearity concave_smooth(double kappa, double kappa0);

  void validate() const;
  double G(double s) const;
  double dG(double s) const;
  double d2G(double s) const;
  std::string name() const;
};

/// Boundary weight rho(x) = c0 + gx x + gy y + q |x|^2, defined on the whole plane.
struct BoundaryWeight {
  double c0 = 1.0;
  double gx = 0.0;
  double gy = 0.0;
  double q = 0.0;

  static BoundaryWeight constant(double c) { return {c, 0.0, 0.0, 0.0}; }
  double value(const Point& p) const { return c0 + gx * p.x() + gy * p.y() + q * p.squaredNorm(); }
  Point gradient(const Point& p) const { return Point(gx + 2.0 * q * p.x(), gy + 2.0 * q * p.y()); }
  bool radial() const { return gx == 0.0 && gy == 0.0; }
};

struct EnergyProblem {
  const Mesh* mesh = nullptr;
  Nonlinearity G;
  double mu = 0.0;
  BoundaryWeight rho;
};

/// mu B rho_h, the discrete boundary load of the nodal interpolant of rho.
Vector boundary_load(const Mesh& mesh, const FemOperators& ops, double mu, const BoundaryWeight& rho);
/// oint rho_h dS on the mesh boundary.
double boundary_weight_integral(const Mesh& mesh, const FemOperators& ops, const BoundaryWeight& rho);

/// Discrete energy v^T K v - 2 Q[G(v)] - 2 v^T (mu B rho_h), Q the quadrature of field_integrals.
double discrete_energy(const EnergyProblem& p, const FemOperators& ops, const Vector& v);
/// Weak-form residual K v - Q[G'(v) phi_i] - mu B rho_h.
Vector energy_residual(const EnergyProblem& p, const FemOperators& ops, const Vector& v);

struct EnergySolution {
  ScalarField u;
  double energy = 0.0;
  double residual = 0.0;  // Euclidean norm of the weak-form residual
  int newton_steps = 0;
  std::vector<double> energy_history;
};

/// Unique minimizer of the discrete energy. quadratic_sink: one linear solve;
/// concave_smooth: damped Newton until the residual is below 1e-10.
/// Throws PreconditionError for affine G and ConvergenceError after 50 Newton steps.
EnergySolution minimize_energy(const EnergyProblem& p);
EnergySolution minimize_energy(const EnergyProblem& p, const FemOperators& ops);

/// Diagnostics for affine G(s) = k s: the compatibility condition k = mu M as printed,
/// the divergence-theorem condition k |Omega| + mu M = 0, and the energy along constants.
ExperimentReport solvability_check(double k, double mu, const BoundaryWeight& rho, const Mesh& mesh);

enum class ComparisonCase { concave_source, quadratic_sink };

/// How the total boundary mass mu M enters the radial comparison problem.
/// normalized: phi'(r_Omega) = mu M / |dB_{r_Omega}| (the minimizer of the comparison energy);
/// literal:    phi'(r_Omega) = mu M.
enum class FluxConvention { normalized, literal };

struct ComparisonProblem {
  double r_omega = 1.0;
  double M = 0.0;        // oint_{dOmega} rho dS
  double gamma_n = 1.0;  // gamma_ratio^2, weight of the volume term in the quadratic_sink case
};

struct ComparisonSolution {
  RadialProfile profile;
  double energy = 0.0;  // int |grad phi|^2 - 2 w int G(phi) - 2 phi(r) mu M, w = gamma_n for quadratic_sink
  double center_value = 0.0;
  double boundary_value = 0.0;
  double boundary_slope = 0.0;
  FluxConvention convention = FluxConvention::normalized;
};

/// quadratic_sink: closed form phi = A I_0(beta rho), beta = sqrt(gamma_n) c.
/// concave_source: RK4 shooting (step r/4096) with bisection on phi(0).
ComparisonSolution comparison_radial_solution(const ComparisonProblem& cp, double mu, const Nonlinearity& G,
                                              FluxConvention convention = FluxConvention::normalized);
/// quadratic_sink profile by RK4 integration of phi'' + phi'/rho = gamma_n c^2 phi, rescaled to the flux.
ComparisonSolution comparison_shooting_quadratic(const ComparisonProblem& cp, double mu, const Nonlinearity& G,
                                                 FluxConvention convention = FluxConvention::normalized);

ComparisonCase comparison_case(const Nonlinearity& G);

/// r_Omega from the pole of green, M = oint rho_h dS, gamma_n = |Omega| / |B_{r_Omega}|.
ComparisonProblem make_comparison_problem(const EnergyProblem& p, const GreenData& green);

/// Allowance for energy comparisons: 0.2 h |reference|.
double energy_mesh_allowance(double h, double reference);

/// E(Omega) <= E(U) <= E(B_{r_Omega}) + eps for the transplanted comparison profile U.
ExperimentReport verify_energy_bound(const EnergyProblem& p, const ComparisonProblem& cp, const GreenData& green);

nlohmann::json to_json(const Nonlinearity& G);
Nonlinearity nonlinearity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoundaryWeight& rho);
BoundaryWeight boundary_weight_from_json(const nlohmann::json& j);

}  // namespace robin
