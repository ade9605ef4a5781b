#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "robin/domain.hpp"
#include "robin/error.hpp"
#include "robin/fem.hpp"
#include "robin/harmonic.hpp"
#include "robin/mesh.hpp"
#include "robin/steklov.hpp"

using namespace robin;

namespace {

Vector random_vector(std::mt19937& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

}  // namespace

TEST(Nonlinearity, DerivativesAndValidation) {
  for (const auto& G : {Nonlinearity::quadratic_sink(1.5, 0.3), Nonlinearity::concave_smooth(2.0, 0.5),
                        Nonlinearity::affine(-0.7)})
    for (double s : {-1.0, 0.0, 0.6, 2.0}) {
      const double e = 1e-5;
      EXPECT_NEAR(G.dG(s), (G.G(s + e) - G.G(s - e)) / (2 * e), 1e-8);
      EXPECT_NEAR(G.d2G(s), (G.dG(s + e) - G.dG(s - e)) / (2 * e), 1e-6);
    }
  EXPECT_THROW(Nonlinearity::quadratic_sink(0.0).validate(), DomainError);
  EXPECT_THROW(Nonlinearity::concave_smooth(-1.0, 0.0).validate(), DomainError);
  EXPECT_THROW(nonlinearity_from_json({{"kind", "cubic"}}), DomainError);
  const auto G = nonlinearity_from_json(to_json(Nonlinearity::concave_smooth(1.2, 0.4)));
  EXPECT_DOUBLE_EQ(G.G(0.3), Nonlinearity::concave_smooth(1.2, 0.4).G(0.3));
}

TEST(Energy, ResidualIsHalfTheGradient) {
  const Mesh m = triangulate(DomainSpec::ellipse(1.5, 1.0), 0.1);
  const auto ops = assemble(m);
  std::mt19937 rng(11);
  for (const auto& G : {Nonlinearity::quadratic_sink(1.0, 0.5), Nonlinearity::concave_smooth(1.0, 0.5)}) {
    const EnergyProblem p{&m, G, 0.4, {1.0, 0.3, -0.2, 0.1}};
    const Vector v = random_vector(rng, Eigen::Index(m.node_count()), 0.5);
    const Vector r = energy_residual(p, ops, v);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector w = random_vector(rng, v.size(), 1.0);
      const double e = 1e-5;
      const double fd = (discrete_energy(p, ops, v + e * w) - discrete_energy(p, ops, v - e * w)) / (2 * e);
      EXPECT_NEAR(fd, 2.0 * w.dot(r), 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(Energy, QuadraticSinkMinimizer) {
  const Mesh m = triangulate(DomainSpec::star_fourier(1.0, {0, 0, 0.25}, {}), 0.08);
  const auto ops = assemble(m);
  const EnergyProblem p{&m, Nonlinearity::quadratic_sink(1.0, 0.2), 1.0, {1.0, 0.5, 0.0, 0.0}};
  const auto sol = minimize_energy(p, ops);
  EXPECT_LT(energy_residual(p, ops, sol.u.values).norm(), 1e-9);
  EXPECT_NEAR(sol.energy, discrete_energy(p, ops, sol.u.values), 1e-10 * std::abs(sol.energy));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector w = random_vector(rng, sol.u.values.size(), 0.05);
    EXPECT_GT(discrete_energy(p, ops, sol.u.values + w), sol.energy);
  }
}

TEST(Energy, NewtonDecreasesMonotonically) {
  const Mesh m = triangulate(DomainSpec::ellipse(1.5, 1.0), 0.08);
  const auto ops = assemble(m);
  const EnergyProblem p{&m, Nonlinearity::concave_smooth(1.0, 0.5), 0.2, BoundaryWeight::constant(-1.0)};
  const auto sol = minimize_energy(p, ops);
  EXPECT_LT(sol.residual, 1e-10);
  ASSERT_GE(sol.energy_history.size(), 2u);
  for (std::size_t i = 1; i < sol.energy_history.size(); ++i)
    EXPECT_LE(sol.energy_history[i], sol.energy_history[i - 1] + 1e-12);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector w = random_vector(rng, sol.u.values.size(), 0.05);
    EXPECT_GT(discrete_energy(p, ops, sol.u.values + w), sol.energy);
  }
}

TEST(Energy, Deterministic) {
  const Mesh m = triangulate(DomainSpec::ellipse(2.0, 1.0), 0.08);
  const EnergyProblem p{&m, Nonlinearity::concave_smooth(1.0, 0.5), 0.2, BoundaryWeight::constant(-1.0)};
  const auto a = minimize_energy(p), b = minimize_energy(p);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_TRUE(a.u.values == b.u.values);
  const Mesh m2 = triangulate(DomainSpec::ellipse(2.0, 1.0), 0.08);
  EXPECT_EQ(m.nodes, m2.nodes);
}

TEST(Energy, AffineIsRejected) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.2);
  const EnergyProblem p{&m, Nonlinearity::affine(1.0), 1.0, BoundaryWeight::constant(1.0)};
  EXPECT_THROW(minimize_energy(p), PreconditionError);
}

TEST(Energy, BoundaryWeightIntegral) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.05);
  const auto ops = assemble(m);
  EXPECT_NEAR(boundary_weight_integral(m, ops, BoundaryWeight::constant(2.0)), 2.0 * m.perimeter(), 1e-12);
  // x integrates to zero around the disk, |x|^2 to the perimeter
  EXPECT_NEAR(boundary_weight_integral(m, ops, {0.0, 1.0, 0.0, 1.0}), m.perimeter(), 1e-3);
}

TEST(Solvability, DivergenceConditionNotPrinted) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.08);
  const double M = m.perimeter();
  // the condition from integrating -Delta u = k against 1: k |Omega| + mu M = 0
  const double k_div = -M / m.area();
  const auto good = solvability_check(k_div, 1.0, BoundaryWeight::constant(1.0), m);
  EXPECT_TRUE(good.extra.at("compatible").get<bool>());
  EXPECT_NEAR(good.quantities.at("constant_shift_energy_change"), 0.0, 1e-8);
  EXPECT_NEAR(good.quantities.at("divergence_defect"), 0.0, 1e-10);
  const auto printed = solvability_check(M, 1.0, BoundaryWeight::constant(1.0), m);
  EXPECT_NEAR(printed.quantities.at("printed_defect"), 0.0, 1e-10);
  EXPECT_TRUE(printed.extra.at("unbounded_below").get<bool>());
  EXPECT_LT(printed.quantities.at("lowest_energy_along_constants"), -100.0);
}

TEST(Comparison, ClosedFormMatchesShooting) {
  const ComparisonProblem cp{0.9, 5.0, 1.3};
  const auto G = Nonlinearity::quadratic_sink(1.2);
  for (auto conv : {FluxConvention::normalized, FluxConvention::literal}) {
    const auto a = comparison_radial_solution(cp, 0.7, G, conv);
    const auto b = comparison_shooting_quadratic(cp, 0.7, G, conv);
    EXPECT_NEAR(a.energy, b.energy, 1e-9 * std::abs(a.energy));
    EXPECT_NEAR(a.center_value, b.center_value, 1e-9 * std::abs(a.center_value));
    for (double r : {0.1, 0.5, 0.9}) EXPECT_NEAR(a.profile.value(r), b.profile.value(r), 1e-9);
  }
  const auto n = comparison_radial_solution(cp, 0.7, G);
  EXPECT_NEAR(n.boundary_slope, 0.7 * 5.0 / (2 * M_PI * 0.9), 1e-12);
}

TEST(Comparison, ConcaveProfileSolvesOde) {
  const ComparisonProblem cp{1.0, -2.0 * M_PI, 1.0};
  const auto G = Nonlinearity::concave_smooth(1.0, 0.5);
  const auto sol = comparison_radial_solution(cp, 0.2, G);
  EXPECT_NEAR(sol.boundary_slope, 0.2 * -2.0 * M_PI / (2 * M_PI), 1e-8);
  // phi'' + phi'/r = -G'(phi), checked by differences away from the origin
  for (double r : {0.3, 0.6, 0.9}) {
    const double e = 1e-3;
    const double d2 = (sol.profile.derivative(r + e) - sol.profile.derivative(r - e)) / (2 * e);
    EXPECT_NEAR(d2 + sol.profile.derivative(r) / r, -G.dG(sol.profile.value(r)), 1e-4);
  }
}

TEST(Comparison, DiskEnergyMatchesClosedForm) {
  const Mesh m = triangulate(DomainSpec::disk(1.0), 0.04);
  const EnergyProblem p{&m, Nonlinearity::quadratic_sink(1.0), 1.0, BoundaryWeight::constant(1.0)};
  const DirichletSolver solver(m);
  const GreenData g = green_function(m, solver, Point(0, 0));
  const auto cp = make_comparison_problem(p, g);
  EXPECT_NEAR(cp.r_omega, 1.0, 1e-10);
  const auto ball = comparison_radial_solution(cp, p.mu, p.G);
  EXPECT_NEAR(minimize_energy(p).energy, ball.energy, 2e-3 * std::abs(ball.energy));
}

TEST(Comparison, ConcaveSourceChainHolds) {
  const Mesh m = triangulate(DomainSpec::ellipse(1.5, 1.0), 0.05);
  const EnergyProblem p{&m, Nonlinearity::concave_smooth(1.0, 0.5), 0.2, BoundaryWeight::constant(-1.0)};
  const DirichletSolver solver(m);
  const auto c = harmonic_center(m, solver);
  const GreenData g = green_function(m, solver, c.center);
  const auto rep = verify_energy_bound(p, make_comparison_problem(p, g), g);
  EXPECT_TRUE(rep.passed());
}
