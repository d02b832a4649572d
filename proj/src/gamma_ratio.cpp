#include "localmean/gamma_ratio.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "localmean/errors.hpp"
#include "localmean/special.hpp"

namespace localmean {

namespace {

using ld = long double;
using cld = std::complex<long double>;

constexpr double kPoleGuard = 1e-8;
constexpr std::array<double, 5> kFitGrid = {100.0, 200.0, 400.0, 800.0, 1600.0};
constexpr double kFitSpreadLimit = 1e-4;

cld widen(cplx z) { return {static_cast<ld>(z.real()), static_cast<ld>(z.imag())}; }
cplx narrow(cld z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

bool near_gamma_pole(cplx z) {
  if (z.real() > 0.5) return false;
  const double n = std::round(z.real());
  return n <= 0.0 && std::abs(z - cplx(n, 0.0)) < kPoleGuard;
}

template <class T>
std::complex<T> log_ratio_impl(const FunctionalEquationSpec& spec, cplx s) {
  std::complex<T> sum{};
  const std::complex<T> st(static_cast<T>(s.real()), static_cast<T>(s.imag()));
  for (std::size_t nu = 0; nu < spec.factors.size(); ++nu) {
    const auto& f = spec.factors[nu];
    const cplx top = f.alpha * s + f.betaTilde;
    const cplx bottom = f.alpha * (1.0 - s) + f.beta;
    if (near_gamma_pole(top)) {
      throw SingularityError("gamma_ratio: factor " + std::to_string(nu) +
                             " Gamma(alpha s + betaTilde) is at a pole");
    }
    if (near_gamma_pole(bottom)) {
      throw SingularityError("gamma_ratio: factor " + std::to_string(nu) +
                             " Gamma(alpha (1-s) + beta) is at a pole (ratio blows up)");
    }
    const T alpha = static_cast<T>(f.alpha);
    const std::complex<T> bt(static_cast<T>(f.betaTilde.real()), static_cast<T>(f.betaTilde.imag()));
    const std::complex<T> b(static_cast<T>(f.beta.real()), static_cast<T>(f.beta.imag()));
    sum += log_gamma(alpha * st + bt) - log_gamma(alpha * (T(1) - st) + b);
  }
  return sum;
}

template <class T>
std::complex<T> log_f_impl(const DerivedConstants& c, int j, cplx s) {
  const cplx z = 2.0 * c.A * (s + c.a) - static_cast<double>(j);
  if (near_gamma_pole(z)) throw SingularityError("f_term: Gamma(2A(s+a) - j) is at a pole");
  const T pi = std::numbers::pi_v<T>;
  const std::complex<T> st(static_cast<T>(s.real()), static_cast<T>(s.imag()));
  const std::complex<T> at(static_cast<T>(c.a.real()), static_cast<T>(c.a.imag()));
  const std::complex<T> kt(static_cast<T>(c.k.real()), static_cast<T>(c.k.imag()));
  const T A = static_cast<T>(c.A);
  const std::complex<T> zt = T(2) * A * (st + at) - static_cast<T>(j);
  return -st * std::log(static_cast<T>(c.h)) + log_gamma(zt) + log_cos(pi * A * (st + at) + kt * pi);
}

// F_j / F_0 = 1 / prod_{l=1}^{j} (2A(s+a) - l)
cld f_ratio(const DerivedConstants& c, int j, cplx s) {
  const cld z = widen(2.0 * c.A * (s + c.a));
  cld prod = 1.0L;
  for (int l = 1; l <= j; ++l) prod *= (z - static_cast<ld>(l));
  return 1.0L / prod;
}

// ratio(s) / F_0(s), long double throughout.
cld scaled_ratio(const FunctionalEquationSpec& spec, const DerivedConstants& c, cplx s) {
  return std::exp(log_ratio_impl<ld>(spec, s) - log_f_impl<ld>(c, 0, s));
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    num += dx * (std::log(ys[i]) - my);
    den += dx * dx;
  }
  return num / den;
}

}  // namespace

cplx log_gamma_ratio(const FunctionalEquationSpec& spec, cplx s) { return log_ratio_impl<double>(spec, s); }

cplx gamma_ratio(const FunctionalEquationSpec& spec, const DerivedConstants&, cplx s) {
  return std::exp(log_gamma_ratio(spec, s));
}

cplx log_f_term(const DerivedConstants& consts, int j, cplx s) { return log_f_impl<double>(consts, j, s); }

cplx f_term(const DerivedConstants& consts, int j, cplx s) { return std::exp(log_f_term(consts, j, s)); }

double fit_line_sigma(const DerivedConstants& consts) { return consts.vartheta() + 1.0 / (4.0 * consts.A); }

ExpansionCoefficients expansion_coeffs(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                                       int J) {
  if (J < 1 || J > kMaxExpansionTerms) {
    throw UnsupportedError("expansion_coeffs: J must be in [1, 4], got " + std::to_string(J));
  }
  ExpansionCoefficients out;
  out.J = J;
  out.sigma0 = fit_line_sigma(consts);
  out.e.push_back(consts.e0);

  constexpr std::size_t n = kFitGrid.size();
  std::array<cld, n> scaled{};
  for (std::size_t i = 0; i < n; ++i) scaled[i] = scaled_ratio(spec, consts, {out.sigma0, kFitGrid[i]});

  for (int j = 1; j < J; ++j) {
    FitDiagnostics diag;
    diag.j = j;
    // Richardson table in h = 1/t, ratio 2 between grid points.
    std::array<std::array<cld, n>, n> R{};
    for (std::size_t i = 0; i < n; ++i) {
      const cplx s{out.sigma0, kFitGrid[i]};
      cld num = scaled[i];
      for (int m = 0; m < j; ++m) num -= widen(out.e[m]) * f_ratio(consts, m, s);
      R[i][0] = num / f_ratio(consts, j, s);
      diag.t.push_back(kFitGrid[i]);
      diag.raw.push_back(narrow(R[i][0]));
    }
    for (std::size_t m = 1; m < n; ++m) {
      const ld factor = std::ldexp(1.0L, static_cast<int>(m)) - 1.0L;
      for (std::size_t i = m; i < n; ++i) R[i][m] = R[i][m - 1] + (R[i][m - 1] - R[i - 1][m - 1]) / factor;
    }
    const cplx estimate = narrow(R[n - 1][n - 1]);
    const double scale = std::max(std::abs(estimate), std::abs(consts.e0));
    diag.estimate = estimate;
    diag.spread = static_cast<double>(std::abs(R[n - 1][n - 1] - R[n - 2][n - 2])) / scale;
    if (!(diag.spread <= kFitSpreadLimit)) {
      throw NumericError("expansion_coeffs: Richardson extrapolation for e_" + std::to_string(j) +
                             " did not settle",
                         diag.spread);
    }
    out.e.push_back(estimate);
    out.fitDiagnostics.push_back(std::move(diag));
  }

  for (auto& diag : out.fitDiagnostics) {
    std::vector<double> ts, rs;
    for (double t : {200.0, 400.0, 800.0, 1600.0}) {
      ts.push_back(t);
      rs.push_back(std::max(1e-300, ratio_residual(spec, consts, out, {out.sigma0, t}, diag.j + 1)));
    }
    diag.residualSlope = loglog_slope(ts, rs);
  }
  return out;
}

double ratio_residual(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                      const ExpansionCoefficients& coeffs, cplx s, int terms) {
  if (terms < 0) terms = coeffs.J;
  if (terms > static_cast<int>(coeffs.e.size())) {
    throw DomainError("ratio_residual: more terms requested than coefficients fitted");
  }
  cld acc = scaled_ratio(spec, consts, s);
  for (int j = 0; j < terms; ++j) acc -= widen(coeffs.e[j]) * f_ratio(consts, j, s);
  return static_cast<double>(std::abs(acc));
}

}  // namespace localmean
