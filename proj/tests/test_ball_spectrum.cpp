#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "robin/ball_spectrum.hpp"
#include "robin/error.hpp"

using namespace robin;

TEST(BallSpectrum, AgreesWithShooting) {
  for (int n : {2, 3, 4})
    for (double alpha : {0.3, 1.0, 4.0})
      for (double r : {0.2, 1.0, 5.0}) {
        const BallProblem p{n, alpha, r};
        const auto res = ball_eigenvalue(p);
        const double shoot = shooting_eigenvalue(p);
        EXPECT_LT(std::abs(res.lambda - shoot) / std::abs(res.lambda), 1e-8) << n << " " << alpha << " " << r;
        EXPECT_LT(std::abs(res.residual), 1e-10);
        EXPECT_EQ(res.sign_changes, 1);
      }
}

TEST(BallSpectrum, ThreeDimensionalClosedForm) {
  // u = sinh(k rho) / rho, so the Robin condition reads k coth(k r) - 1/r = alpha.
  for (double alpha : {0.5, 2.0})
    for (double r : {0.5, 2.0}) {
      const auto res = ball_eigenvalue({3, alpha, r});
      const double k = res.k;
      EXPECT_NEAR(k / std::tanh(k * r) - 1.0 / r, alpha, 1e-10);
      EXPECT_NEAR(res.lambda, -k * k, 1e-12 * k * k);
    }
}

TEST(BallSpectrum, SmallAlphaMatchesConstantTrial) {
  // lambda ~ -alpha |dB| / |B| as alpha -> 0
  const double alpha = 1e-5;
  for (int n : {2, 3}) {
    const auto res = ball_eigenvalue({n, alpha, 1.0});
    EXPECT_NEAR(res.lambda / (-alpha * n), 1.0, 1e-4);
  }
}

TEST(BallSpectrum, LargeAlphaAsymptotics) {
  // sqrt|lambda| = alpha + (n - 1) / (2 r) + O(1/alpha)
  const double alpha = 400.0;
  for (int n : {2, 3}) {
    const auto res = ball_eigenvalue({n, alpha, 1.0});
    EXPECT_NEAR(res.k - alpha, 0.5 * (n - 1), 5e-3);
  }
}

TEST(BallSpectrum, MonotonicityReport) {
  std::vector<double> radii;
  for (int i = 0; i < 25; ++i) radii.push_back(0.05 * std::pow(400.0, i / 24.0));
  for (int n : {2, 3}) {
    const auto rep = ball_monotonicity_check(n, 1.0, radii);
    EXPECT_TRUE(rep.passed());
    ASSERT_EQ(rep.rows.size(), radii.size());
    for (const auto& row : rep.rows) EXPECT_NEAR(row.y, std::pow(row.r, 0.5 * n) * row.sqrt_abs_lambda, 1e-12 * row.y);
  }
}

TEST(BallSpectrum, MonotonicityRejectsBadGrid) {
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(ball_monotonicity_check(2, 1.0, unsorted), PreconditionError);
  const std::vector<double> negative{-1.0, 0.5};
  EXPECT_THROW(ball_monotonicity_check(2, 1.0, negative), PreconditionError);
}

TEST(BallSpectrum, CurvatureCombinationNegative) {
  for (double r : {0.05, 0.5, 3.0, 30.0})
    for (int n : {2, 3, 5}) EXPECT_LT(ball_eigenvalue({n, 1.0, r}).curvature_combination(), 0.0);
}

TEST(BallSpectrum, ProfileSatisfiesRobinCondition) {
  const auto res = ball_eigenvalue({2, 1.5, 0.8});
  EXPECT_DOUBLE_EQ(res.profile(0.0), 1.0);
  EXPECT_NEAR(res.profile_derivative(0.8), 1.5 * res.profile(0.8), 1e-10);
  EXPECT_NEAR(res.u_boundary, res.profile(0.8), 1e-12);
}

TEST(BallSpectrum, NormalizationIntegral) {
  // n = 2: int u^2 = 2 pi int_0^r I0(k rho)^2 rho drho, checked by a midpoint sum
  const auto res = ball_eigenvalue({2, 1.0, 1.0});
  const int m = 20000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double rho = (i + 0.5) / m;
    s += res.profile(rho) * res.profile(rho) * rho / m;
  }
  EXPECT_NEAR(2.0 * M_PI * s, res.l2_norm_sq, 1e-6 * res.l2_norm_sq);
}

TEST(BallSpectrum, Geometry) {
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * M_PI, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4.0 * M_PI, 1e-14);
  EXPECT_NEAR(ball_volume(3, 2.0), 4.0 / 3.0 * M_PI * 8.0, 1e-12);
}

TEST(BallSpectrum, RejectsInvalidProblems) {
  EXPECT_THROW(ball_eigenvalue({1, 1.0, 1.0}), PreconditionError);
  EXPECT_THROW(ball_eigenvalue({2, 0.0, 1.0}), PreconditionError);
  EXPECT_THROW(ball_eigenvalue({2, 1.0, -1.0}), PreconditionError);
  EXPECT_THROW(radial_shooting_oracle({2, 1.0, 1.0}, 1.0), PreconditionError);
}
