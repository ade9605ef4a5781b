#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <gtest/gtest.h>

#include "robin/bessel.hpp"
#include "robin/error.hpp"

using namespace robin;

namespace {

const double kOrders[] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.5};
const double kArgs[] = {1e-6, 1e-3, 0.1, 0.7, 1.0, 3.0, 8.0, 20.0, 60.0};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Bessel, MatchesBoostValues) {
  for (double nu : kOrders)
    for (double z : kArgs)
      EXPECT_LT(rel(bessel_i(BesselOrder(nu), z), boost::math::cyl_bessel_i(nu, z)), 1e-12) << nu << " " << z;
}

TEST(Bessel, ScaledAgreesWithUnscaled) {
  for (double nu : kOrders)
    for (double z : kArgs)
      EXPECT_LT(rel(bessel_i_scaled(BesselOrder(nu), z), std::exp(-z) * boost::math::cyl_bessel_i(nu, z)), 1e-12);
}

TEST(Bessel, ScaledStaysFiniteForHugeArguments) {
  const double z = 5000.0;
  const double v = bessel_i_scaled(BesselOrder(1.0), z);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v * std::sqrt(2.0 * M_PI * z), 1.0, 1e-3);
}

TEST(Bessel, DerivativeMatchesBoost) {
  for (double nu : kOrders)
    for (double z : kArgs) {
      if (z < 1e-3 && nu > 0.0 && nu < 1.0) continue;  // I'_nu blows up at 0 for 0 < nu < 1
      EXPECT_LT(rel(bessel_i_prime(BesselOrder(nu), z), boost::math::cyl_bessel_i_prime(nu, z)), 1e-10)
          << nu << " " << z;
    }
}

TEST(Bessel, LogDerivativeIsRatio) {
  for (double nu : kOrders)
    for (double z : {0.1, 1.0, 10.0, 300.0}) {
      const double expected = boost::math::cyl_bessel_i_prime(nu, z) / boost::math::cyl_bessel_i(nu, z);
      if (!std::isfinite(expected)) continue;
      EXPECT_LT(rel(bessel_i_log_derivative(BesselOrder(nu), z), expected), 1e-10);
    }
  // large-argument limit of I'/I is 1 - 1/(2z) + ...
  EXPECT_NEAR(bessel_i_log_derivative(BesselOrder(0.0), 1e4), 1.0 - 0.5e-4, 1e-8);
}

TEST(Bessel, HalfIntegerClosedForm) {
  for (double z : {0.2, 1.0, 5.0}) {
    const double i_half = std::sqrt(2.0 / (M_PI * z)) * std::sinh(z);
    EXPECT_LT(rel(bessel_i(BesselOrder(0.5), z), i_half), 1e-13);
  }
}

TEST(Bessel, OrderForDimension) {
  EXPECT_DOUBLE_EQ(BesselOrder::for_dimension(2).value(), 0.0);
  EXPECT_DOUBLE_EQ(BesselOrder::for_dimension(3).value(), 0.5);
  EXPECT_DOUBLE_EQ(BesselOrder::for_dimension(5).value(), 1.5);
  EXPECT_THROW(BesselOrder::for_dimension(1), DomainError);
}

TEST(Bessel, RejectsBadInput) {
  EXPECT_THROW(BesselOrder(-0.5), DomainError);
  EXPECT_THROW(BesselOrder(std::nan("")), DomainError);
  EXPECT_THROW(bessel_i(BesselOrder(0.0), -1.0), DomainError);
  EXPECT_THROW(bessel_i(BesselOrder(0.0), INFINITY), DomainError);
  EXPECT_THROW(bessel_i_prime(BesselOrder(0.0), 0.0), DomainError);
}

TEST(Bessel, ValueAtZero) {
  EXPECT_DOUBLE_EQ(bessel_i(BesselOrder(0.0), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bessel_i(BesselOrder(2.0), 0.0), 0.0);
}
