#include "localmean/weight.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "localmean/errors.hpp"
#include "localmean/quadrature.hpp"

namespace localmean {

namespace {

constexpr std::size_t kBaseNodes = 96;
constexpr std::size_t kMaxNodes = std::size_t{1} << 16;
constexpr int kSupSamples = 20001;

// phi0^(r)(u) = phi0(u) P_r(u) / (1 - u^2)^{2r}, with
// P_{r+1} = -2u P_r + (1 - u^2)^2 P_r' + 4 r u (1 - u^2) P_r, P_0 = 1.
using Poly = std::vector<double>;

std::array<Poly, kMaxDerivativeOrder + 1> build_numerators() {
  std::array<Poly, kMaxDerivativeOrder + 1> p;
  p[0] = {1.0};
  auto mul = [](const Poly& x, const Poly& y) {
    Poly out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
  };
  auto add = [](Poly x, const Poly& y) {
    if (x.size() < y.size()) x.resize(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] += y[i];
    return x;
  };
  const Poly oneMinusU2 = {1.0, 0.0, -1.0};
  const Poly oneMinusU2Sq = mul(oneMinusU2, oneMinusU2);
  for (int r = 0; r < kMaxDerivativeOrder; ++r) {
    const Poly& cur = p[r];
    Poly deriv(cur.size() > 1 ? cur.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < cur.size(); ++i) deriv[i - 1] = static_cast<double>(i) * cur[i];
    Poly next = mul({0.0, -2.0}, cur);
    next = add(next, mul(oneMinusU2Sq, deriv));
    next = add(next, mul(mul({0.0, 4.0 * r}, oneMinusU2), cur));
    p[r + 1] = std::move(next);
  }
  return p;
}

const std::array<Poly, kMaxDerivativeOrder + 1>& numerators() {
  static const auto p = build_numerators();
  return p;
}

double horner(const Poly& p, double u) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * u + *it;
  return acc;
}

const std::array<double, kMaxDerivativeOrder + 1>& bump_sups() {
  static const auto sups = [] {
    std::array<double, kMaxDerivativeOrder + 1> out{};
    for (int r = 0; r <= kMaxDerivativeOrder; ++r) {
      double best = 0.0;
      for (int i = 1; i < kSupSamples - 1; ++i) {
        const double u = -1.0 + 2.0 * i / (kSupSamples - 1);
        best = std::max(best, std::abs(bump_derivative(r, u)));
      }
      out[r] = best;
    }
    return out;
  }();
  return sups;
}

}  // namespace

double bump(double u) {
  const double q = 1.0 - u * u;
  if (q <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

double bump_derivative(int r, double u) {
  if (r < 0 || r > kMaxDerivativeOrder) {
    throw UnsupportedError("bump_derivative: order " + std::to_string(r) + " exceeds ceiling 8");
  }
  const double q = 1.0 - u * u;
  if (q <= 0.0) return 0.0;
  const double logScale = 1.0 - 1.0 / q - 2.0 * r * std::log(q);
  return std::exp(logScale) * horner(numerators()[r], u);
}

double bump_integral() {
  static const double value = integrate_gl([](double u) { return bump(u); }, -1.0, 1.0, 256);
  return value;
}

WeightProfile WeightProfile::make(double delta, double X, double A) {
  if (!(delta > 0.0) || !(X > 0.0) || !(A > 0.0)) {
    throw DomainError("WeightProfile: delta, X and A must be positive");
  }
  WeightProfile p;
  p.delta = delta;
  p.X = X;
  p.A = A;
  p.L = std::pow(X, 1.0 / (2.0 * A)) / delta;
  if (!(p.L > 1.0)) throw DomainError("WeightProfile: L must exceed 1 so the support stays in (0, inf)");
  return p;
}

WeightProfile WeightProfile::with_L(double L, double A) {
  return make(1.0, std::pow(L, 2.0 * A), A);
}

double weight(const WeightProfile& profile, double u) { return bump((u - 1.0) * profile.L); }

double weight_derivative(const WeightProfile& profile, int r, double u) {
  return std::pow(profile.L, r) * bump_derivative(r, (u - 1.0) * profile.L);
}

double weight_integral(const WeightProfile& profile) {
  // u = 1 + t/L keeps the bump argument exact.
  auto f = [](double t) { return bump(t); };
  double prev = integrate_gl(f, -1.0, 1.0, 64);
  for (std::size_t n = 128; n <= 4096; n *= 2) {
    const double cur = integrate_gl(f, -1.0, 1.0, n);
    if (std::abs(cur - prev) <= 1e-14 * std::abs(cur)) return cur / profile.L;
    prev = cur;
  }
  throw NumericError("weight_integral: Gauss-Legendre did not converge", std::abs(prev));
}

std::size_t mellin_node_count(const WeightProfile& profile, cplx s) {
  const auto [lo, hi] = profile.support();
  const double phaseVariation = std::abs(s.imag()) * (std::log(hi) - std::log(lo));
  const auto cycles = static_cast<std::size_t>(std::ceil(phaseVariation / (2.0 * std::numbers::pi)));
  return std::min(kMaxNodes, kBaseNodes + 8 * cycles);
}

cplx mellin(const WeightProfile& profile, cplx s) { return mellin_derivative(profile, s, 0); }

cplx mellin_derivative(const WeightProfile& profile, cplx s, int i) {
  const cplx sm1 = s - 1.0;
  const double invL = 1.0 / profile.L;
  auto f = [&](double t) {
    const double lu = std::log1p(t * invL);
    return bump(t) * std::exp(sm1 * lu) * std::pow(lu, i);
  };
  return integrate_gl(f, -1.0, 1.0, mellin_node_count(profile, s)) * invL;
}

double derivative_sup(const WeightProfile& profile, int r) {
  if (r < 0 || r > kMaxDerivativeOrder) {
    throw UnsupportedError("derivative_sup: order " + std::to_string(r) + " exceeds ceiling 8");
  }
  return std::pow(profile.L, r) * bump_sups()[r];
}

}  // namespace localmean
