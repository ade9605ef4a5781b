#include "robin/fem.hpp"

#include <cmath>
#include <sstream>

#include "robin/error.hpp"

namespace robin {

ScalarField::ScalarField(const Mesh& m, Vector v) : mesh(&m), values(std::move(v)) {
  if (values.size() != Eigen::Index(m.node_count()))
    throw PreconditionError("ScalarField: value count does not match node count");
  if (!values.allFinite()) throw PreconditionError("ScalarField: non-finite nodal value");
}

double ScalarField::evaluate(const Point& p) const {
  std::array<double, 3> bary;
  const int t = mesh->locate(p, bary);
  if (t < 0) throw RangeError("ScalarField::evaluate: point outside mesh");
  const auto& tri = mesh->triangles[t];
  return bary[0] * values[tri[0]] + bary[1] * values[tri[1]] + bary[2] * values[tri[2]];
}

Point ScalarField::gradient(std::size_t t) const {
  const auto g = basis_gradients(*mesh, t);
  const auto& tri = mesh->triangles[t];
  return values[tri[0]] * g[0] + values[tri[1]] * g[1] + values[tri[2]] * g[2];
}

std::array<Point, 3> basis_gradients(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.nodes[tri[0]];
  const Point& b = mesh.nodes[tri[1]];
  const Point& c = mesh.nodes[tri[2]];
  const double two_area = 2.0 * mesh.areas[t];
  // grad lambda_i = rot90(opposite edge) / (2 area)
  return {Point(b.y() - c.y(), c.x() - b.x()) / two_area, Point(c.y() - a.y(), a.x() - c.x()) / two_area,
          Point(a.y() - b.y(), b.x() - a.x()) / two_area};
}

FemOperators assemble(const Mesh& mesh) {
  using Triplet = Eigen::Triplet<double>;
  const auto n = Eigen::Index(mesh.node_count());
  std::vector<Triplet> kt, mt, bt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = mesh.areas[t];
    if (!(area > 0.0)) throw MeshError("assemble: degenerate element " + std::to_string(t));
    const auto g = basis_gradients(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tri[i], tri[j], area * g[i].dot(g[j]));
        mt.emplace_back(tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
      }
  }
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const double len = mesh.edge_length(e);
    const auto [a, b] = mesh.boundary_edges[e];
    bt.emplace_back(a, a, len / 3.0);
    bt.emplace_back(b, b, len / 3.0);
    bt.emplace_back(a, b, len / 6.0);
    bt.emplace_back(b, a, len / 6.0);
  }
  FemOperators ops;
  ops.K.resize(n, n);
  ops.M.resize(n, n);
  ops.B.resize(n, n);
  ops.K.setFromTriplets(kt.begin(), kt.end());
  ops.M.setFromTriplets(mt.begin(), mt.end());
  ops.B.setFromTriplets(bt.begin(), bt.end());
  return ops;
}

EigenResult robin_principal_eigen(const Mesh& mesh, double alpha) {
  return robin_principal_eigen(mesh, assemble(mesh), alpha);
}

EigenResult robin_principal_eigen(const Mesh& mesh, const FemOperators& ops, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("robin_principal_eigen: alpha must be > 0");
  const SparseMatrix A = ops.K - alpha * ops.B;
  const double shift = -alpha * mesh.perimeter() / mesh.area() - 1.0;
  const SparseMatrix shifted = A - shift * ops.M;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) throw ConvergenceError("robin_principal_eigen: factorization failed");

  Vector x = Vector::Ones(A.rows());
  x /= std::sqrt(x.dot(ops.M * x));
  double lambda = x.dot(A * x);
  EigenResult res;
  for (int it = 1; it <= 500; ++it) {
    Vector y = solver.solve(ops.M * x);
    const Vector My = ops.M * y;
    y /= std::sqrt(y.dot(My));
    const double next = y.dot(A * y) / y.dot(ops.M * y);
    const Vector dx = y - x;
    const double step = std::sqrt(dx.dot(ops.M * dx));
    x = std::move(y);
    const double change = std::abs(next - lambda);
    lambda = next;
    if (change < 1e-12 * std::max(1.0, std::abs(lambda)) && step < 1e-10) {
      res.iterations = it;
      break;
    }
    if (it == 500) {
      std::ostringstream msg;
      msg << "robin_principal_eigen: no convergence in 500 iterations (last change " << change << ")";
      throw ConvergenceError(msg.str());
    }
  }
  if (x.sum() < 0.0) x = -x;
  res.lambda = lambda;
  res.rayleigh_residual = (A * x - lambda * (ops.M * x)).norm();
  res.field = ScalarField(mesh, std::move(x));
  return res;
}

DirichletSolver::DirichletSolver(const Mesh& mesh) : mesh_(&mesh) { init(assemble(mesh).K); }

DirichletSolver::DirichletSolver(const Mesh& mesh, const SparseMatrix& K) : mesh_(&mesh) { init(K); }

void DirichletSolver::init(const SparseMatrix& K) {
  const auto& mesh = *mesh_;
  const std::size_t n = mesh.node_count();
  interior_index_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.is_boundary(int(i))) continue;
    interior_index_[i] = int(interior_nodes_.size());
    interior_nodes_.push_back(int(i));
  }
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> ii, ib;
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      const int r = int(it.row()), c = int(it.col());
      if (interior_index_[r] < 0) continue;
      if (interior_index_[c] >= 0) ii.emplace_back(interior_index_[r], interior_index_[c], it.value());
      else ib.emplace_back(interior_index_[r], mesh.boundary_index(c), it.value());
    }
  }
  const auto ni = Eigen::Index(interior_nodes_.size());
  Kii_.resize(ni, ni);
  Kii_.setFromTriplets(ii.begin(), ii.end());
  Kib_.resize(ni, Eigen::Index(mesh.boundary_nodes.size()));
  Kib_.setFromTriplets(ib.begin(), ib.end());
  factor_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(Kii_);
  if (factor_->info() != Eigen::Success) throw ConvergenceError("DirichletSolver: singular interior system");
}

Vector DirichletSolver::solve(const Vector& g) const {
  const auto& mesh = *mesh_;
  if (g.size() != Eigen::Index(mesh.boundary_nodes.size()))
    throw PreconditionError("DirichletSolver: boundary data size mismatch");
  if (!g.allFinite()) throw PreconditionError("DirichletSolver: non-finite boundary data");
  Vector u(mesh.node_count());
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) u[mesh.boundary_nodes[i]] = g[Eigen::Index(i)];
  if (!interior_nodes_.empty()) {
    const Vector ui = factor_->solve(-(Kib_ * g));
    for (std::size_t k = 0; k < interior_nodes_.size(); ++k) u[interior_nodes_[k]] = ui[Eigen::Index(k)];
  }
  return u;
}

double DirichletSolver::interior_residual(const Vector& u) const {
  const auto& mesh = *mesh_;
  Vector ui(Eigen::Index(interior_nodes_.size()));
  for (std::size_t k = 0; k < interior_nodes_.size(); ++k) ui[Eigen::Index(k)] = u[interior_nodes_[k]];
  const Vector g = boundary_trace(mesh, u);
  const Vector rhs = Kib_ * g;
  const Vector r = Kii_ * ui + rhs;
  const double scale = std::max(rhs.norm(), 1e-300);
  return rhs.norm() == 0.0 ? r.norm() : r.norm() / scale;
}

ScalarField dirichlet_solve(const Mesh& mesh, const std::map<int, double>& boundary_values) {
  Vector g(Eigen::Index(mesh.boundary_nodes.size()));
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) {
    const auto it = boundary_values.find(mesh.boundary_nodes[i]);
    if (it == boundary_values.end())
      throw PreconditionError("dirichlet_solve: missing value for boundary node " +
                              std::to_string(mesh.boundary_nodes[i]));
    g[Eigen::Index(i)] = it->second;
  }
  DirichletSolver solver(mesh);
  return ScalarField(mesh, solver.solve(g));
}

ScalarField helmholtz_neumann_solve(const Mesh& mesh, double c2, const Vector& flux) {
  if (!(c2 > 0.0)) throw PreconditionError("helmholtz_neumann_solve: c2 must be > 0");
  if (flux.size() != Eigen::Index(mesh.boundary_nodes.size()))
    throw PreconditionError("helmholtz_neumann_solve: flux size mismatch");
  const auto ops = assemble(mesh);
  Vector g = Vector::Zero(Eigen::Index(mesh.node_count()));
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) g[mesh.boundary_nodes[i]] = flux[Eigen::Index(i)];
  const SparseMatrix A = ops.K + c2 * ops.M;
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success) throw ConvergenceError("helmholtz_neumann_solve: factorization failed");
  return ScalarField(mesh, solver.solve(ops.B * g));
}

FieldIntegrals field_integrals(const ScalarField& field, const std::function<double(double)>& f) {
  const Mesh& mesh = *field.mesh;
  const Vector& u = field.values;
  FieldIntegrals out;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double a = u[tri[0]], b = u[tri[1]], c = u[tri[2]];
    constexpr double w1 = 2.0 / 3.0, w2 = 1.0 / 6.0;
    const double q = f(w1 * a + w2 * b + w2 * c) + f(w2 * a + w1 * b + w2 * c) + f(w2 * a + w2 * b + w1 * c);
    out.volume += mesh.areas[t] * q / 3.0;
    const Point g = field.gradient(t);
    out.dirichlet += mesh.areas[t] * g.squaredNorm();
  }
  const double gp = 0.5 / std::sqrt(3.0);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto [i, j] = mesh.boundary_edges[e];
    const double a = u[i], b = u[j];
    const double v1 = (0.5 - gp) * b + (0.5 + gp) * a;
    const double v2 = (0.5 + gp) * b + (0.5 - gp) * a;
    out.boundary += 0.5 * mesh.edge_length(e) * (f(v1) + f(v2));
  }
  return out;
}

Vector boundary_trace(const Mesh& mesh, const Vector& u) {
  Vector g(Eigen::Index(mesh.boundary_nodes.size()));
  for (std::size_t i = 0; i < mesh.boundary_nodes.size(); ++i) g[Eigen::Index(i)] = u[mesh.boundary_nodes[i]];
  return g;
}

}  // namespace robin
