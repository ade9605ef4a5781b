#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "robin/ball_spectrum.hpp"
#include "robin/domain.hpp"
#include "robin/error.hpp"
#include "robin/fem.hpp"
#include "robin/mesh.hpp"

using namespace robin;

namespace {

// k tanh(k a) = alpha, the one-dimensional Robin eigenvalue on (-a, a)
double interval_root(double alpha, double a) {
  double lo = 0.0, hi = alpha + 1.0 / a + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tanh(mid * a) < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Domain, DiskAndEllipseGeometry) {
  const auto disk = DomainSpec::disk(2.0);
  EXPECT_NEAR(disk.area(), 4.0 * M_PI, 1e-10);
  EXPECT_NEAR(disk.perimeter(), 4.0 * M_PI, 1e-8);
  EXPECT_NEAR(disk.curvature(0.7), 0.5, 1e-10);
  const auto e = DomainSpec::ellipse(2.0, 1.0);
  EXPECT_NEAR(e.area(), 2.0 * M_PI, 1e-10);
  EXPECT_NEAR(e.perimeter(), 9.688448220547675, 1e-8);
  EXPECT_NEAR(e.curvature(0.0), 2.0, 1e-8);  // a / b^2
  EXPECT_NEAR(e.curvature(M_PI / 2), 0.25, 1e-8);
  const Point n = e.outward_normal(0.0);
  EXPECT_NEAR(n.x(), 1.0, 1e-12);
  EXPECT_NEAR(e.arc_length(0.0, 2.0 * M_PI), e.perimeter(), 1e-8);
}

TEST(Domain, ValidationAndJson) {
  EXPECT_THROW(DomainSpec::star_fourier(1.0, {1.2}, {}).validate(), PreconditionError);
  EXPECT_THROW(DomainSpec::polygon({{0, 0}, {0, 1}, {1, 0}}), PreconditionError);  // clockwise
  EXPECT_THROW(DomainSpec::ellipse(-1.0, 1.0), PreconditionError);
  const auto s = DomainSpec::star_fourier(1.0, {0.0, 0.2}, {0.1});
  const auto back = domain_from_json(to_json(s));
  for (double t : {0.0, 1.0, 2.5}) EXPECT_DOUBLE_EQ(back.star.radius(t), s.star.radius(t));
  const auto d = domain_from_json({{"kind", "disk"}, {"radius", 3.0}});
  EXPECT_NEAR(d.area(), 9.0 * M_PI, 1e-9);
  EXPECT_THROW(domain_from_json({{"kind", "torus"}}), PreconditionError);
}

TEST(Mesh, Invariants) {
  for (const auto& spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0),
                           DomainSpec::star_fourier(1.0, {0, 0, 0.3}, {}), DomainSpec::rectangle(0, 0, 2, 1)}) {
    const Mesh m = triangulate(spec, 0.08);
    double sum = 0.0;
    for (double a : m.areas) {
      EXPECT_GT(a, 0.0);
      sum += a;
    }
    EXPECT_NEAR(sum, m.area(), 1e-12);
    EXPECT_NEAR(m.area(), spec.area(), 0.02 * spec.area());
    EXPECT_NEAR(m.perimeter(), spec.perimeter(), 0.01 * spec.perimeter());
    EXPECT_GT(min_angle_degrees(m), 20.0);
    EXPECT_EQ(m.boundary_edges.size(), m.boundary_nodes.size());
    for (int b : m.boundary_nodes) EXPECT_TRUE(m.is_boundary(b));
    // Euler characteristic of a disk
    const long edges = (3 * long(m.triangles.size()) + long(m.boundary_edges.size())) / 2;
    EXPECT_EQ(long(m.node_count()) - edges + long(m.triangles.size()), 1);
  }
}

TEST(Mesh, RoundTrip) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.15);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh back = read_mesh(ss);
  ASSERT_EQ(back.node_count(), m.node_count());
  ASSERT_EQ(back.triangles, m.triangles);
  EXPECT_NEAR(back.area(), m.area(), 1e-12);
  std::stringstream bad("3 1\n0 0\n");
  EXPECT_THROW(read_mesh(bad), MeshError);
}

TEST(Mesh, RejectsBadSpacing) {
  EXPECT_THROW(triangulate(DomainSpec::disk(1.0), 0.0), PreconditionError);
  EXPECT_THROW(triangulate(DomainSpec::disk(1.0), 1.0), PreconditionError);
}

TEST(Mesh, DeformationMatchesTarget) {
  const auto from = DomainSpec::disk(1.0);
  const auto to = DomainSpec::ellipse(1.5, 1.0);
  const Mesh m = deform_star_mesh(triangulate(from, 0.08), from, to);
  for (int b : m.boundary_nodes) {
    const Point p = m.nodes[b];
    EXPECT_NEAR(p.x() * p.x() / 2.25 + p.y() * p.y(), 1.0, 1e-10);
  }
}

TEST(Fem, OperatorIdentities) {
  const Mesh m = triangulate(DomainSpec::ellipse(1.5, 1.0), 0.08);
  const auto ops = assemble(m);
  const Vector one = Vector::Ones(Eigen::Index(m.node_count()));
  Vector x(one.size()), y(one.size());
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    x[Eigen::Index(i)] = m.nodes[i].x();
    y[Eigen::Index(i)] = m.nodes[i].y();
  }
  EXPECT_NEAR(one.dot(ops.M * one), m.area(), 1e-12);
  EXPECT_NEAR(one.dot(ops.B * one), m.perimeter(), 1e-12);
  EXPECT_NEAR((ops.K * one).norm(), 0.0, 1e-12);
  EXPECT_NEAR(x.dot(ops.K * x), m.area(), 1e-12);
  EXPECT_NEAR(x.dot(ops.K * y), 0.0, 1e-12);
}

TEST(Fem, QuadratureExactOnLinearFields) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.1);
  Vector v(Eigen::Index(m.node_count()));
  for (std::size_t i = 0; i < m.node_count(); ++i) v[Eigen::Index(i)] = 2.0 + m.nodes[i].x();
  const ScalarField f(m, v);
  const auto q = field_integrals(f, [](double s) { return s; });
  double cx = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    cx += m.areas[t] * (m.nodes[tr[0]].x() + m.nodes[tr[1]].x() + m.nodes[tr[2]].x()) / 3.0;
  }
  EXPECT_NEAR(q.volume, 2.0 * m.area() + cx, 1e-12);
  EXPECT_NEAR(q.dirichlet, m.area(), 1e-12);
  EXPECT_NEAR(f.evaluate(Point(0.1, 0.2)), 2.1, 1e-12);
  EXPECT_THROW(f.evaluate(Point(3.0, 0.0)), RangeError);
}

TEST(Fem, DirichletReproducesLinearData) {
  const Mesh m = triangulate(DomainSpec::star_fourier(1.0, {0, 0, 0.2}, {}), 0.08);
  const DirichletSolver solver(m);
  Vector g(Eigen::Index(m.boundary_nodes.size()));
  for (std::size_t i = 0; i < m.boundary_nodes.size(); ++i) {
    const Point p = m.nodes[m.boundary_nodes[i]];
    g[Eigen::Index(i)] = 1.0 + 2.0 * p.x() - 3.0 * p.y();
  }
  const Vector u = solver.solve(g);
  for (std::size_t i = 0; i < m.node_count(); ++i)
    EXPECT_NEAR(u[Eigen::Index(i)], 1.0 + 2.0 * m.nodes[i].x() - 3.0 * m.nodes[i].y(), 1e-10);
  EXPECT_LT(solver.interior_residual(u), 1e-10);
  EXPECT_THROW(solver.solve(Vector::Zero(3)), PreconditionError);
}

TEST(Fem, HelmholtzNeumannConstantFlux) {
  // -Delta u + c2 u = 0, du/dn = g on the disk: u = g I0(sqrt(c2) r) / (sqrt(c2) I1(sqrt(c2)))
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.04);
  const double c2 = 4.0;
  const Vector flux = Vector::Ones(Eigen::Index(m.boundary_nodes.size()));
  const ScalarField u = helmholtz_neumann_solve(m, c2, flux);
  const double centre = 1.0 / (2.0 * std::cyl_bessel_i(1.0, 2.0));
  EXPECT_NEAR(u.evaluate(Point(0, 0)), centre, 1e-2 * centre);
  EXPECT_THROW(helmholtz_neumann_solve(m, 0.0, flux), PreconditionError);
}

TEST(Fem, DiskEigenvalueConverges) {
  const double alpha = 1.0;
  const double exact = ball_eigenvalue({2, alpha, 1.0}).lambda;
  const double coarse = robin_principal_eigen(triangulate(DomainSpec::disk(1.0), 0.1), alpha).lambda;
  const double fine = robin_principal_eigen(triangulate(DomainSpec::disk(1.0), 0.05), alpha).lambda;
  EXPECT_LT(std::abs(fine - exact), std::abs(coarse - exact));
  EXPECT_LT(std::abs(fine - exact) / std::abs(exact), 5e-3);
}

TEST(Fem, RectangleEigenvalueSeparable) {
  const double alpha = 1.0;
  const double k1 = interval_root(alpha, 1.0), k2 = interval_root(alpha, 0.5);
  const double exact = -(k1 * k1 + k2 * k2);
  const auto eig = robin_principal_eigen(triangulate(DomainSpec::rectangle(-1, -0.5, 1, 0.5), 0.04), alpha);
  EXPECT_NEAR(eig.lambda, exact, 5e-3 * std::abs(exact));
}

TEST(Fem, EigenpairIsConsistent) {
  const Mesh m = triangulate(DomainSpec::ellipse(2.0, 1.0), 0.08);
  const auto ops = assemble(m);
  const double alpha = 0.7;
  const auto eig = robin_principal_eigen(m, ops, alpha);
  const Vector& u = eig.field.values;
  EXPECT_GT(u.minCoeff(), 0.0);
  EXPECT_NEAR(u.dot(ops.M * u), 1.0, 1e-10);
  const double rq = (u.dot(ops.K * u) - alpha * u.dot(ops.B * u)) / u.dot(ops.M * u);
  EXPECT_NEAR(rq, eig.lambda, 1e-9);
  const Vector r = ops.K * u - alpha * (ops.B * u) - eig.lambda * (ops.M * u);
  EXPECT_LT(r.norm(), 1e-7);
  // the constant function is an admissible trial
  EXPECT_LE(eig.lambda, -alpha * m.perimeter() / m.area());
}

TEST(Fem, RayleighQuotientIsMinimal) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.12);
  const auto ops = assemble(m);
  const auto eig = robin_principal_eigen(m, ops, 1.0);
  std::mt19937 rng(7);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 50; ++trial) {
    Vector v = eig.field.values;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 0.1 * N(rng);
    const double rq = (v.dot(ops.K * v) - v.dot(ops.B * v)) / v.dot(ops.M * v);
    EXPECT_GE(rq, eig.lambda - 1e-10);
  }
}

TEST(Fem, RejectsNonPositiveAlpha) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.2);
  EXPECT_THROW(robin_principal_eigen(m, 0.0), PreconditionError);
}
