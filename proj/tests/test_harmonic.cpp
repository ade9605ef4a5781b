#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "robin/domain.hpp"
#include "robin/error.hpp"
#include "robin/harmonic.hpp"
#include "robin/mesh.hpp"

using namespace robin;

namespace {

struct Meshed {
  Mesh mesh;
  DirichletSolver solver;
  explicit Meshed(const DomainSpec& spec, double h = 0.05) : mesh(triangulate(spec, h)), solver(mesh) {}
};

RadialProfile power_profile(double R, double p) {
  return {[p](double r) { return std::pow(r, p); }, [p](double r) { return p * std::pow(r, p - 1.0); }, R};
}

}  // namespace

TEST(Green, DiskMatchesLogarithm) {
  Meshed s(DomainSpec::disk(1.0));
  const GreenData g = green_function(s.mesh, s.solver, Point(0, 0));
  EXPECT_NEAR(g.harmonic_radius_at_pole, 1.0, 1e-10);
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i) {
    const double r = s.mesh.nodes[i].norm();
    if (r < 0.2) continue;
    EXPECT_NEAR(g.green[i], -std::log(r) * green_gamma, 1e-3);
  }
}

TEST(Green, DiskHarmonicRadiusOffCentre) {
  // r(y) = R (1 - |y|^2 / R^2) on the disk
  Meshed s(DomainSpec::disk(2.0), 0.08);
  for (double a : {0.0, 0.4, 0.8, 1.2}) {
    const Point y(a, 0.3 * a);
    const double expected = 2.0 * (1.0 - y.squaredNorm() / 4.0);
    EXPECT_NEAR(harmonic_radius(s.mesh, s.solver, y), expected, 2e-3 * expected);
  }
}

TEST(Green, Invariants) {
  Meshed s(DomainSpec::ellipse(2.0, 1.0));
  const GreenData g = green_function(s.mesh, s.solver, Point(0.3, 0.1));
  EXPECT_GE(g.green.values.minCoeff(), -1e-8);
  for (int b : s.mesh.boundary_nodes) EXPECT_EQ(g.green[std::size_t(b)], 0.0);
  EXPECT_THROW(green_function(s.mesh, s.solver, Point(1.98, 0.0)), PreconditionError);
}

TEST(Green, RadiusDecreasesAlongRay) {
  Meshed s(DomainSpec::ellipse(2.0, 1.0));
  double prev = INFINITY;
  for (double x = 0.0; x < 1.7; x += 0.15) {
    const double r = harmonic_radius(s.mesh, s.solver, Point(x, 0.0));
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Green, CenterOfSymmetricDomains) {
  Meshed disk(DomainSpec::disk(1.0));
  const auto c = harmonic_center(disk.mesh, disk.solver);
  EXPECT_LT(c.center.norm(), 1e-2);
  EXPECT_NEAR(c.radius, 1.0, 1e-4);
  Meshed ell(DomainSpec::ellipse(1.5, 1.0));
  const auto ce = harmonic_center(ell.mesh, ell.solver);
  EXPECT_LT(ce.center.norm(), 5e-2);
  EXPECT_LE(M_PI * ce.radius * ce.radius, ell.mesh.area());
  // the maximum beats its neighbours
  for (const Point d : {Point(0.05, 0), Point(0, 0.05), Point(-0.05, 0.02)})
    EXPECT_LE(harmonic_radius(ell.mesh, ell.solver, ce.center + d), ce.radius + 1e-9);
}

TEST(Green, SquareHarmonicRadius) {
  // reference value from a 5-point finite-difference solve on 201^2 and 401^2 grids, extrapolated
  Meshed s(DomainSpec::rectangle(-0.5, -0.5, 0.5, 0.5), 0.025);
  EXPECT_NEAR(harmonic_radius(s.mesh, s.solver, Point(0, 0)), 0.5393526, 1e-3);
}

TEST(LevelSets, LinearFieldAreaIsExact) {
  const Mesh m = triangulate(DomainSpec::rectangle(0, 0, 1, 1), 0.1);
  Vector v(Eigen::Index(m.node_count()));
  for (std::size_t i = 0; i < m.node_count(); ++i) v[Eigen::Index(i)] = m.nodes[i].x();
  const ScalarField f(m, v);
  for (double t : {-0.5, 0.0, 0.13, 0.5, 0.77, 1.0, 2.0})
    EXPECT_NEAR(superlevel_area(f, t), std::clamp(1.0 - t, 0.0, 1.0), 1e-12) << t;
}

TEST(LevelSets, TableAndMeasureBound) {
  Meshed s(DomainSpec::ellipse(2.0, 1.0));
  const auto c = harmonic_center(s.mesh, s.solver);
  const GreenData g = green_function(s.mesh, s.solver, c.center);
  std::vector<double> ts{0.0};
  for (int i = 0; i < 15; ++i) ts.push_back(1e-3 * std::pow(300.0, i / 14.0));
  const auto table = level_set_measures(g, ts);
  EXPECT_NEAR(table.m_omega[0], s.mesh.area(), 1e-12);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_LE(table.m_omega[i], table.m_omega[i - 1]);
  EXPECT_NEAR(table.gamma_ratio * table.gamma_ratio * M_PI * table.r_omega * table.r_omega, s.mesh.area(), 1e-10);
  const auto l2 = verify_lemma_cap2(table);
  EXPECT_TRUE(l2.passed);
  const std::vector<double> bad{0.2, 0.1};
  EXPECT_THROW(level_set_measures(g, bad), PreconditionError);
}

TEST(LevelSets, CapacityMatchesBall) {
  for (const auto& spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(1.5, 1.0)}) {
    Meshed s(spec);
    const auto c = harmonic_center(s.mesh, s.solver);
    const GreenData g = green_function(s.mesh, s.solver, c.center);
    for (double t : {0.05, 0.1, 0.2}) {
      const auto cap = verify_capacity_equality(g, t);
      EXPECT_NEAR(cap.cap_ball, 1.0 / t, 1e-9 / t);
      EXPECT_LT(cap.relative_gap, 1e-2);
    }
    EXPECT_THROW(verify_capacity_equality(g, 5.0), RangeError);
    EXPECT_THROW(verify_capacity_equality(g, 0.0), PreconditionError);
  }
}

TEST(Transplant, ConstantIntegrandIsArea) {
  Meshed s(DomainSpec::ellipse(2.0, 1.0));
  const auto c = harmonic_center(s.mesh, s.solver);
  const GreenData g = green_function(s.mesh, s.solver, c.center);
  const double gamma = std::sqrt(s.mesh.area() / (M_PI * c.radius * c.radius));
  const auto rep = verify_transplant_bounds(power_profile(c.radius, 1.0), g, c.radius, gamma, [](double) { return 1.0; });
  EXPECT_NEAR(rep.domain_integral, s.mesh.area(), 1e-10);
  EXPECT_NEAR(rep.ball_integral, M_PI * c.radius * c.radius, 1e-10);
  EXPECT_NEAR(rep.upper_bound, s.mesh.area(), 1e-10);
  EXPECT_TRUE(rep.passed);
}

TEST(Transplant, BallIntegralsClosedForm) {
  const auto phi = power_profile(2.0, 2.0);
  EXPECT_NEAR(ball_integral(phi, [](double s) { return s; }), 2.0 * M_PI * 16.0 / 4.0, 1e-10);
  EXPECT_NEAR(ball_dirichlet_energy(phi), 2.0 * M_PI * 4.0 * 16.0 / 4.0, 1e-9);
}

TEST(Transplant, IncreasingProfileIntegralExceedsScaledBall) {
  // For a radially increasing profile the distribution function of U dominates the
  // rescaled ball one, so the domain integral sits above gamma^2 times the ball integral.
  Meshed s(DomainSpec::ellipse(2.0, 1.0));
  const auto c = harmonic_center(s.mesh, s.solver);
  const GreenData g = green_function(s.mesh, s.solver, c.center);
  const double gamma = std::sqrt(s.mesh.area() / (M_PI * c.radius * c.radius));
  const auto rep =
      verify_transplant_bounds(power_profile(c.radius, 2.0), g, c.radius, gamma, [](double v) { return 1.0 + v; });
  EXPECT_GT(rep.domain_integral, rep.upper_bound + rep.epsilon);
  EXPECT_GT(rep.lower_margin, 0.0);
  EXPECT_FALSE(rep.passed);
}

TEST(Transplant, DiskTransplantIsIdentity) {
  Meshed s(DomainSpec::disk(1.0));
  const GreenData g = green_function(s.mesh, s.solver, Point(0, 0));
  const auto U = transplant(power_profile(1.0, 2.0), g, 1.0);
  for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
    if (s.mesh.nodes[i].norm() > 0.2) EXPECT_NEAR(U[i], s.mesh.nodes[i].squaredNorm(), 5e-3);
}

TEST(Transplant, RejectsBadInputs) {
  Meshed s(DomainSpec::disk(1.0), 0.1);
  const GreenData g = green_function(s.mesh, s.solver, Point(0, 0));
  const RadialProfile decreasing{[](double r) { return 1.0 - r; }, [](double) { return -1.0; }, 1.0};
  EXPECT_THROW(verify_transplant_bounds(decreasing, g, 1.0, 1.0, [](double) { return 1.0; }), PreconditionError);
  EXPECT_THROW(verify_transplant_bounds(power_profile(1.0, 1.0), g, 1.0, 1.0, [](double v) { return v; }),
               PreconditionError);
  EXPECT_THROW(verify_transplant_bounds(power_profile(1.0, 1.0), g, 1.0, 1.0, [](double v) { return 2.0 - v; }),
               PreconditionError);
}

TEST(Theorem1, EllipseAndDeterminism) {
  const auto a = theorem1_check(DomainSpec::ellipse(1.5, 1.0), 1.0, 0.08);
  EXPECT_TRUE(a.passed());
  const auto b = theorem1_check(DomainSpec::ellipse(1.5, 1.0), 1.0, 0.08);
  for (const auto& [k, v] : a.quantities) EXPECT_EQ(v, b.quantities.at(k)) << k;
  EXPECT_THROW(theorem1_check(DomainSpec::disk(1.0), -1.0, 0.1), DomainError);
}
