#include "localmean/special.hpp"

namespace localmean {

std::complex<double> zeta_euler_maclaurin(std::complex<double> s) {
  if (std::abs(s - 1.0) < 1e-12) throw SingularityError("zeta: pole at s = 1");
  constexpr int N = 30;
  // B_{2k} for k = 1..12
  static constexpr double kBernoulli[] = {
      1.0 / 6.0,     -1.0 / 30.0,        1.0 / 42.0,   -1.0 / 30.0,
      5.0 / 66.0,    -691.0 / 2730.0,    7.0 / 6.0,    -3617.0 / 510.0,
      43867.0 / 798.0, -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0};
  std::complex<double> sum{};
  for (int n = 1; n < N; ++n) sum += std::pow(static_cast<double>(n), -s);
  const double logN = std::log(static_cast<double>(N));
  const std::complex<double> nPow = std::exp(-s * logN);
  sum += static_cast<double>(N) * nPow / (s - 1.0) + 0.5 * nPow;
  // term_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  std::complex<double> rising = s;
  double factorial = 2.0;
  double nInv = 1.0 / N;
  double nScale = nInv;
  for (int k = 1; k <= 12; ++k) {
    sum += kBernoulli[k - 1] / factorial * rising * nPow * nScale;
    rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
    factorial *= static_cast<double>(2 * k + 1) * static_cast<double>(2 * k + 2);
    nScale *= nInv * nInv;
  }
  return sum;
}

}  // namespace localmean
