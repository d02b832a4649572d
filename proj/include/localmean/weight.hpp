#pragma once

#include <complex>
#include <utility>

namespace localmean {

using cplx = std::complex<double>;

enum class BumpKind { StandardExp };

// phi0(u) = exp(1 - 1/(1 - u^2)) on (-1, 1), zero elsewhere.
double bump(double u);

// r-th derivative of the bump, from exact rational forms (r <= 8).
double bump_derivative(int r, double u);

// Integral of the bump over [-1, 1].
double bump_integral();

inline constexpr int kMaxDerivativeOrder = 8;

// The localized weight phi(u) = phi0((u - 1) L) with L = X^{1/(2A)} / delta.
struct WeightProfile {
  double delta = 0.1;
  double X = 1.0;
  double A = 0.5;
  double L = 1.0;
  BumpKind bump = BumpKind::StandardExp;

  static WeightProfile make(double delta, double X, double A);
  // Picks X so that the profile has the requested L (delta fixed at 1).
  static WeightProfile with_L(double L, double A = 0.5);

  std::pair<double, double> support() const noexcept { return {1.0 - 1.0 / L, 1.0 + 1.0 / L}; }
};

double weight(const WeightProfile& profile, double u);

// r-th derivative of u -> phi(u).
double weight_derivative(const WeightProfile& profile, int r, double u);

double weight_integral(const WeightProfile& profile);

// Mellin transform phi^(s) = int phi(u) u^{s-1} du.
cplx mellin(const WeightProfile& profile, cplx s);

// i-th s-derivative of the Mellin transform: int phi(u) u^{s-1} (log u)^i du.
cplx mellin_derivative(const WeightProfile& profile, cplx s, int i);

// Node count used by mellin() at s.
std::size_t mellin_node_count(const WeightProfile& profile, cplx s);

// sup |phi^(r)| by dense sampling of the analytic derivative.
double derivative_sup(const WeightProfile& profile, int r);

}  // namespace localmean
