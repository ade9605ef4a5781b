#pragma once

#include <functional>
#include <map>
#include <memory>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "robin/mesh.hpp"

namespace robin {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// P1 nodal field on a mesh. The mesh is not owned and must outlive the field.
struct ScalarField {
  const Mesh* mesh = nullptr;
  Vector values;

  ScalarField() = default;
  ScalarField(const Mesh& m, Vector v);

  double operator[](std::size_t i) const { return values[Eigen::Index(i)]; }
  /// P1 interpolation at an arbitrary point; throws RangeError outside the mesh.
  double evaluate(const Point& p) const;
  /// Constant gradient on triangle t.
  Point gradient(std::size_t t) const;
};

/// Stiffness, consistent mass and boundary mass matrices of the P1 space.
/// u^T K u = int |grad u|^2, u^T M u = int u^2, u^T B u = boundary integral of u^2,
/// all exact for P1 fields.
struct FemOperators {
  SparseMatrix K;
  SparseMatrix M;
  SparseMatrix B;
};

FemOperators assemble(const Mesh& mesh);

/// Gradients of the three barycentric basis functions on triangle t.
std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t t);

struct EigenResult {
  double lambda = 0.0;
  ScalarField field;  // L2-normalized, positive
  double rayleigh_residual = 0.0;
  int iterations = 0;
};

/// Principal eigenpair of (K - alpha B) u = lambda M u by shift-and-invert
/// iteration with the shift -alpha |dOmega|/|Omega| - 1, which lies below the
/// spectrum. Throws ConvergenceError after 500 iterations.
EigenResult robin_principal_eigen(const Mesh& mesh, double alpha);
EigenResult robin_principal_eigen(const Mesh& mesh, const FemOperators& ops, double alpha);

/// Discrete harmonic extension of boundary data with a cached factorization of
/// the interior stiffness block, for repeated solves on one mesh.
class DirichletSolver {
 public:
  explicit DirichletSolver(const Mesh& mesh);
  DirichletSolver(const Mesh& mesh, const SparseMatrix& K);

  /// boundary_values is aligned with mesh.boundary_nodes.
  Vector solve(const Vector& boundary_values) const;
  /// Relative residual of the interior equations for a full nodal vector.
  double interior_residual(const Vector& u) const;

 private:
  void init(const SparseMatrix& K);

  const Mesh* mesh_;
  std::vector<int> interior_index_;  // node -> interior unknown, -1 on the boundary
  std::vector<int> interior_nodes_;
  SparseMatrix Kii_;
  SparseMatrix Kib_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

/// Harmonic extension of boundary data given as (boundary node -> value).
/// Every boundary node must be present.
ScalarField dirichlet_solve(const Mesh& mesh, const std::map<int, double>& boundary_values);

/// Solves (K + c2 M) u = B g for nodal boundary flux g (aligned with mesh.boundary_nodes).
ScalarField helmholtz_neumann_solve(const Mesh& mesh, double c2, const Vector& flux);

struct FieldIntegrals {
  double volume = 0.0;    // int f(u) dx, 3-point rule per triangle
  double boundary = 0.0;  // boundary integral of f(u), 2-point Gauss per edge
  double dirichlet = 0.0; // int |grad u|^2 dx, exact for P1
};

FieldIntegrals field_integrals(const ScalarField& field, const std::function<double(double)>& f);

/// Full nodal vector -> values on the boundary loop.
Vector boundary_trace(const Mesh& mesh, const Vector& u);

}  // namespace robin
