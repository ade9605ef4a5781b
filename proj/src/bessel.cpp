#include "robin/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "robin/error.hpp"

namespace robin {

namespace {

double series_scaled(double nu, double z) {
  // sum_k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)), multiplied by e^{-z}.
  // Work in logs for the prefactor so that large z does not overflow.
  const double half = 0.5 * z;
  const double q = half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double log_pref = nu * std::log(half) - std::lgamma(nu + 1.0) - z;
  return sum * std::exp(log_pref);
}

double asymptotic_scaled(double nu, double z) {
  // e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k,
  // a_k = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k). Truncated at the smallest term.
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * z);
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double scaled_unchecked(double nu, double z) {
  if (z <= 20.0 * std::max(1.0, nu)) return series_scaled(nu, z);
  return asymptotic_scaled(nu, z);
}

void check_argument(double z, const char* what) {
  if (!std::isfinite(z)) throw DomainError(std::string(what) + ": non-finite argument");
  if (z < 0.0) throw DomainError(std::string(what) + ": negative argument");
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!std::isfinite(nu) || nu < 0.0) throw DomainError("Bessel order must be finite and >= 0");
}

BesselOrder BesselOrder::for_dimension(int n) {
  if (n < 2) throw DomainError("dimension must be >= 2");
  return BesselOrder(0.5 * (n - 2));
}

double bessel_switch_point(BesselOrder order) { return 20.0 * std::max(1.0, order.value()); }

double bessel_i_scaled(BesselOrder order, double z) {
  check_argument(z, "bessel_i");
  return scaled_unchecked(order.value(), z);
}

double bessel_i(BesselOrder order, double z) {
  check_argument(z, "bessel_i");
  return scaled_unchecked(order.value(), z) * std::exp(z);
}

double bessel_i_prime_scaled(BesselOrder order, double z) {
  if (!std::isfinite(z) || z <= 0.0) throw DomainError("bessel_i_prime: argument must be > 0");
  const double nu = order.value();
  if (nu == 0.0) return scaled_unchecked(1.0, z);
  if (nu >= 1.0) {
    return 0.5 * (scaled_unchecked(nu - 1.0, z) + scaled_unchecked(nu + 1.0, z));
  }
  return scaled_unchecked(nu + 1.0, z) + (nu / z) * scaled_unchecked(nu, z);
}

double bessel_i_prime(BesselOrder order, double z) {
  return bessel_i_prime_scaled(order, z) * std::exp(z);
}

double bessel_i_log_derivative(BesselOrder order, double z) {
  return bessel_i_prime_scaled(order, z) / bessel_i_scaled(order, z);
}

}  // namespace robin
