#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "localmean/errors.hpp"

namespace localmean {

namespace detail {

// B_{2k} / (2k (2k-1)), k = 1..12.
inline constexpr long double kStirling[] = {
    1.0L / 12.0L,
    -1.0L / 360.0L,
    1.0L / 1260.0L,
    -1.0L / 1680.0L,
    1.0L / 1188.0L,
    -691.0L / 360360.0L,
    1.0L / 156.0L,
    -3617.0L / 122400.0L,
    43867.0L / 244188.0L,
    -174611.0L / 125400.0L,
    77683.0L / 5796.0L,
    -236364091.0L / 1506960.0L,
};

template <class T>
std::complex<T> log_gamma_stirling(std::complex<T> z) {
  const T halfLog2Pi = T(0.5) * std::log(T(2) * std::numbers::pi_v<T>);
  std::complex<T> sum = (z - T(0.5)) * std::log(z) - z + halfLog2Pi;
  const std::complex<T> zinv = T(1) / z;
  const std::complex<T> zinv2 = zinv * zinv;
  std::complex<T> pw = zinv;
  for (long double c : kStirling) {
    sum += static_cast<T>(c) * pw;
    pw *= zinv2;
  }
  return sum;
}

// sin(pi z) with argument reduction on the real part.
template <class T>
std::complex<T> sin_pi(std::complex<T> z) {
  const T pi = std::numbers::pi_v<T>;
  T x = z.real();
  const T y = z.imag();
  const T n = std::round(x);
  const T f = x - n;
  const T sign = (std::fmod(std::abs(n), T(2)) == T(1)) ? T(-1) : T(1);
  const T s = sign * std::sin(pi * f);
  const T c = sign * std::cos(pi * f);
  return {s * std::cosh(pi * y), c * std::sinh(pi * y)};
}

}  // namespace detail

// Principal branch of log Gamma(z) on C minus (-inf, 0], continuous across
// the plane away from the negative real axis. Stirling for large |z|,
// upward recurrence for small |z|, reflection for Re z < 1/2 near the axis.
template <class T>
std::complex<T> log_gamma(std::complex<T> z) {
  constexpr T kStirlingRadius = 15;
  constexpr T kReflectImag = 30;
  const T pi = std::numbers::pi_v<T>;
  if (z.real() <= 0 && z.imag() == 0 && z.real() == std::floor(z.real())) {
    throw SingularityError("log_gamma: pole at non-positive integer");
  }
  if (z.real() < T(0.5)) {
    if (std::abs(z.imag()) <= kReflectImag) {
      const T sgn = std::signbit(z.imag()) ? T(-1) : T(1);
      const T k = std::floor(z.real() / 2 + T(0.25));
      const std::complex<T> corr(std::log(pi), sgn * 2 * pi * k);
      return corr - std::log(detail::sin_pi(z)) - log_gamma(std::complex<T>(1) - z);
    }
    const auto n = static_cast<long>(std::ceil(T(0.5) - z.real()));
    std::complex<T> acc{};
    for (long j = 0; j < n; ++j) acc += std::log(z + static_cast<T>(j));
    return log_gamma(z + static_cast<T>(n)) - acc;
  }
  if (std::abs(z) < kStirlingRadius) {
    const auto n = static_cast<long>(std::ceil(kStirlingRadius - z.real()));
    std::complex<T> acc{};
    for (long j = 0; j < n; ++j) acc += std::log(z + static_cast<T>(j));
    return detail::log_gamma_stirling(z + static_cast<T>(n)) - acc;
  }
  return detail::log_gamma_stirling(z);
}

// log cos(w) modulo 2 pi i, without overflow for large |Im w|.
template <class T>
std::complex<T> log_cos(std::complex<T> w) {
  const std::complex<T> i(0, 1);
  if (std::abs(w.imag()) < 20) return std::log(std::cos(w));
  if (w.imag() > 0) return -i * w + std::log((T(1) + std::exp(T(2) * i * w)) / T(2));
  return i * w + std::log((T(1) + std::exp(T(-2) * i * w)) / T(2));
}

// Riemann zeta by Euler-Maclaurin summation, s != 1. Accurate to about
// 1e-14 for |s| <= 10.
std::complex<double> zeta_euler_maclaurin(std::complex<double> s);

}  // namespace localmean
