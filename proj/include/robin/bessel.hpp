#pragma once

namespace robin {

/// Order of a modified Bessel function arising from a radial Laplacian in R^n,
/// nu = (n - 2) / 2.
class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  static BesselOrder for_dimension(int n);

  double value() const { return nu_; }

 private:
  double nu_;
};

/// Modified Bessel function of the first kind I_nu(z), z >= 0.
///
/// Ascending power series for z <= 20 max(1, nu), Hankel large-argument expansion
/// beyond. The expansion uses the standard normalization
/// I_nu(z) ~ e^z / sqrt(2 pi z) (sum of (-1)^k a_k(nu) z^-k).
double bessel_i(BesselOrder order, double z);

/// e^{-z} I_nu(z); same two regimes, finite for every finite z >= 0.
double bessel_i_scaled(BesselOrder order, double z);

/// dI_nu/dz for z > 0. I'_0 = I_1; I'_nu = (I_{nu-1} + I_{nu+1}) / 2 for nu >= 1;
/// I'_nu = I_{nu+1} + (nu / z) I_nu for 0 < nu < 1.
double bessel_i_prime(BesselOrder order, double z);

/// e^{-z} I'_nu(z).
double bessel_i_prime_scaled(BesselOrder order, double z);

/// I'_nu(z) / I_nu(z) for z > 0, computed without overflow.
double bessel_i_log_derivative(BesselOrder order, double z);

/// Argument at which bessel_i switches from the series to the asymptotic expansion.
double bessel_switch_point(BesselOrder order);

}  // namespace robin
