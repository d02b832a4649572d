#include "localmean/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "localmean/errors.hpp"
#include "localmean/quadrature.hpp"

namespace localmean {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kOscBaseNodes = 96;
constexpr std::size_t kOscNodesPerCycle = 5;
constexpr std::size_t kMassNodes = 2048;
constexpr double kMassSafety = 1.02;
constexpr double kTailMassFactor = 2.0;

// Coefficient density near the end of the data: sum |b_n| over the upper
// half of the indices divided by the mu span it covers.
double end_density(const std::vector<CoefficientPoint>& dual) {
  const std::size_t M = dual.size();
  if (M < 2) return M == 1 ? std::abs(dual[0].a) / std::max(dual[0].lambda, 1.0) : 0.0;
  const std::size_t half = M / 2;
  double mass = 0.0;
  for (std::size_t n = half; n < M; ++n) mass += std::abs(dual[n].a);
  const double span = dual[M - 1].lambda - dual[half - 1].lambda;
  return mass / span;
}

// Estimate of sum_{n > M} |b_n| mu_n^{-s}: the end density integrated
// against mu^{-s} past mu_M, doubled, with sigma* in place of 1.
double beyond_data(double density, double muM, double sExp, double sigmaStar) {
  return kTailMassFactor * density * std::pow(muM, 1.0 - sExp) / (sExp - sigmaStar);
}

// Gauss-Legendre tables on the weight support, cached per node count. Each
// table stores u^beta, the weighted integrand prefactor phi(u) u^{Re p0}
// and the per-j step u^dp, so the inner loop is one sincos per node.
class UQuadrature {
 public:
  UQuadrature(const WeightProfile& profile, double beta, cplx p0, double dp)
      : profile_(profile), beta_(beta), p0_(p0), dp_(dp) {
    std::tie(lo_, hi_) = profile.support();
  }

  struct Table {
    std::vector<double> uBeta;
    std::vector<double> pre;    // w_i phi(u_i) u_i^{Re p0}
    std::vector<double> step;   // u_i^dp
    std::vector<double> logU;
  };

  const Table& table(std::size_t n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (lo_ + hi_);
    const double half = 0.5 * (hi_ - lo_);
    Table t;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = mid + half * rule.nodes[i];
      const double w = half * rule.weights[i] * weight(profile_, u);
      if (w == 0.0) continue;
      const double lu = std::log(u);
      t.logU.push_back(lu);
      t.uBeta.push_back(beta_ == 1.0 ? u : std::exp(beta_ * lu));
      t.pre.push_back(w * std::exp(p0_.real() * lu));
      t.step.push_back(std::exp(dp_ * lu));
    }
    return cache_.emplace(n, std::move(t)).first->second;
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double beta() const noexcept { return beta_; }
  cplx p0() const noexcept { return p0_; }

 private:
  WeightProfile profile_;
  double beta_;
  cplx p0_;
  double dp_;
  double lo_ = 0.0, hi_ = 0.0;
  std::map<std::size_t, Table> cache_;
};

std::size_t node_count(double lo, double hi, double beta, double scale) {
  const double variation = scale * std::abs(std::pow(hi, beta) - std::pow(lo, beta));
  const double cycles = std::ceil(variation / (2.0 * kPi));
  if (!(cycles < 1e9)) return std::numeric_limits<std::size_t>::max();
  return kOscBaseNodes + kOscNodesPerCycle * static_cast<std::size_t>(cycles);
}

// Computes Q_j = int phi(u) u^{p0 + j dp} cos(scale u^beta + c0 + j pi/2) du
// for j < J in one pass over the nodes.
void batch_integrals(UQuadrature& quad, double scale, cplx c0, int J, cplx* out) {
  const std::size_t n = node_count(quad.lo(), quad.hi(), quad.beta(), scale);
  if (n > kOscillatoryNodeCeiling) {
    throw OscillationError("oscillatory integral needs " + std::to_string(n) + " nodes, ceiling is " +
                               std::to_string(kOscillatoryNodeCeiling),
                           static_cast<double>(n));
  }
  const auto& t = quad.table(n);
  const std::size_t m = t.pre.size();
  if (quad.p0().imag() == 0.0 && c0.imag() == 0.0) {
    const double c = c0.real();
    double acc[kMaxExpansionTerms] = {0, 0, 0, 0};
    if (J == 1) {
      for (std::size_t i = 0; i < m; ++i) acc[0] += t.pre[i] * std::cos(scale * t.uBeta[i] + c);
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        const double phase = scale * t.uBeta[i] + c;
        const double cs = std::cos(phase), sn = std::sin(phase);
        // cos(z + j pi/2) cycles through cos, -sin, -cos, sin
        const double cyc[4] = {cs, -sn, -cs, sn};
        double pw = t.pre[i];
        for (int j = 0; j < J; ++j) {
          acc[j] += pw * cyc[j & 3];
          pw *= t.step[i];
        }
      }
    }
    for (int j = 0; j < J; ++j) out[j] = acc[j];
    return;
  }
  const double pIm = quad.p0().imag();
  for (int j = 0; j < J; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const cplx phase = scale * t.uBeta[i] + c0;
    const cplx cs = std::cos(phase), sn = std::sin(phase);
    const cplx cyc[4] = {cs, -sn, -cs, sn};
    cplx pw = t.pre[i] * std::polar(1.0, pIm * t.logU[i]);
    for (int j = 0; j < J; ++j) {
      out[j] += pw * cyc[j & 3];
      pw *= t.step[i];
    }
  }
}

// Partial Bell polynomials B_{n,k}(x_1, ..., x_{n-k+1}) for n, k <= 8.
using BellTable = std::array<std::array<cplx, kMaxDerivativeOrder + 1>, kMaxDerivativeOrder + 1>;

BellTable bell_table(const std::array<cplx, kMaxDerivativeOrder + 1>& x) {
  BellTable b{};
  b[0][0] = 1.0;
  for (int n = 1; n <= kMaxDerivativeOrder; ++n) {
    for (int k = 1; k <= n; ++k) {
      cplx acc = 0.0;
      double binom = 1.0;  // C(n-1, i-1)
      for (int i = 1; i <= n - k + 1; ++i) {
        acc += binom * x[i] * b[n - i][k - 1];
        binom = binom * (n - i) / i;
      }
      b[n][k] = acc;
    }
  }
  return b;
}

// Falling factorial v (v-1) ... (v-m+1).
cplx falling(cplx v, int m) {
  cplx out = 1.0;
  for (int i = 0; i < m; ++i) out *= (v - static_cast<double>(i));
  return out;
}

struct ExpansionSetup {
  int J = 1;
  double beta = 1.0;
  std::vector<cplx> scalar;     // omega e_j (hx)^{1 + a - j/(2A)} / (2Ah)
  std::vector<IbpBound> bounds;
  std::vector<double> vartheta; // vartheta(j)
  int rLow = 0;
};

ExpansionSetup make_setup(const DerivedConstants& c, const std::vector<cplx>& e, const WeightProfile& profile,
                          double x, int J, bool withOmega) {
  ExpansionSetup s;
  s.J = J;
  s.beta = 1.0 / (2.0 * c.A);
  const double hx = c.h * x;
  for (int j = 0; j < J; ++j) {
    const cplx p = c.a - j * s.beta;
    const cplx scal = (withOmega ? c.omega : cplx(1.0)) * e[j] * std::exp((1.0 + p) * std::log(hx)) /
                      (2.0 * c.A * c.h);
    s.scalar.push_back(scal);
    s.bounds.emplace_back(profile, c.A, p, (c.k + 0.5 * j) * kPi);
    s.vartheta.push_back(c.vartheta() + j * s.beta);
  }
  return s;
}

// Per-term bounds, suffix remainder, and the truncation point.
struct TailPlan {
  std::size_t N = 0;
  double tailBound = 0.0;
};

TailPlan plan_truncation(const FunctionalEquationSpec& spec, const DerivedConstants& c, const ExpansionSetup& s,
                         const std::vector<CoefficientPoint>& dual, double x, const TruncationPolicy& policy) {
  const std::size_t M = dual.size();
  const double hx = c.h * x;
  std::vector<double> termBound(M, 0.0);
  for (std::size_t n = 0; n < M; ++n) {
    const double mu = dual[n].lambda;
    const double bmag = std::abs(dual[n].a);
    if (bmag == 0.0) continue;
    const double Y = std::pow(hx * mu, s.beta);
    double acc = 0.0;
    for (int j = 0; j < s.J; ++j) {
      acc += std::abs(s.scalar[j]) * std::pow(mu, -s.vartheta[j]) * s.bounds[j].bound(Y, 0, policy.rOrder);
    }
    termBound[n] = bmag * acc;
  }

  double remainder = 0.0;
  if (M > 0) {
    const double density = end_density(dual);
    const double muM = dual.back().lambda;
    for (int j = 0; j < s.J; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r <= kMaxDerivativeOrder; ++r) {
        if (policy.rOrder > 0 && r != policy.rOrder) continue;
        const double sExp = s.vartheta[j] + r * s.beta;
        if (!(sExp > spec.sigmaStar)) continue;
        const double val = s.bounds[j].derivative_mass(r) * std::pow(hx, -r * s.beta) *
                           beyond_data(density, muM, sExp, spec.sigmaStar);
        best = std::min(best, val);
      }
      remainder += std::abs(s.scalar[j]) * best;
    }
  }

  const std::size_t limit = std::min(M, policy.maxTerms);
  // suffix[n] = sum_{i >= n} termBound[i] + remainder (0-based)
  double suffix = remainder;
  for (std::size_t n = M; n > limit; --n) suffix += termBound[n - 1];
  if (!(suffix <= policy.tolerance)) {
    throw TruncationError("series tail bound " + std::to_string(suffix) + " exceeds tolerance " +
                              std::to_string(policy.tolerance) + " with " + std::to_string(limit) +
                              " terms available",
                          suffix);
  }
  std::size_t N = limit;
  while (N > 0 && suffix + termBound[N - 1] <= policy.tolerance) {
    suffix += termBound[N - 1];
    --N;
  }
  return {N, suffix};
}

TruncatedSum run_expansion(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                           const std::vector<cplx>& e, const CoefficientStream& dualStream,
                           const WeightProfile& profile, double x, const TruncationPolicy& policy, int J,
                           bool withOmega) {
  if (!(x > 0.0)) throw DomainError("x must be positive");
  const auto& dual = dualStream.dual();
  const ExpansionSetup s = make_setup(c, e, profile, x, J, withOmega);
  const TailPlan plan = plan_truncation(spec, c, s, dual, x, policy);

  UQuadrature quad(profile, s.beta, c.a, -s.beta);
  const double hx = c.h * x;
  cplx q[kMaxExpansionTerms];
  cplx total = 0.0;
  for (std::size_t n = 0; n < plan.N; ++n) {
    const double mu = dual[n].lambda;
    const cplx b = dual[n].a;
    if (b == cplx{}) continue;
    batch_integrals(quad, std::pow(hx * mu, s.beta), c.k * kPi, J, q);
    const double logMu = std::log(mu);
    cplx term = 0.0;
    for (int j = 0; j < J; ++j) term += s.scalar[j] * std::exp((c.a - j * s.beta) * logMu) * q[j];
    total += b * term;
  }
  return {total, plan.tailBound, plan.N};
}

}  // namespace

int ceil_plus(double v) { return std::max(1, static_cast<int>(std::floor(v)) + 1); }

// ---------------------------------------------------------------------------

std::size_t window_count(const CoefficientStream& stream, const WeightProfile& profile, double x) {
  const double lo = x * (1.0 - 1.0 / profile.L);
  const double hi = x * (1.0 + 1.0 / profile.L);
  const auto& pts = stream.points;
  auto first = std::upper_bound(pts.begin(), pts.end(), lo,
                                [](double v, const CoefficientPoint& p) { return v < p.lambda; });
  auto last = std::lower_bound(pts.begin(), pts.end(), hi,
                               [](const CoefficientPoint& p, double v) { return p.lambda < v; });
  return last > first ? static_cast<std::size_t>(last - first) : 0;
}

cplx direct_local_sum(const CoefficientStream& stream, const WeightProfile& profile, double x) {
  if (!(x > 0.0)) throw DomainError("direct_local_sum: x must be positive");
  const double lo = x * (1.0 - 1.0 / profile.L);
  const double hi = x * (1.0 + 1.0 / profile.L);
  if (stream.max_lambda() < hi) {
    throw InsufficientDataError("direct_local_sum: stream ends at lambda " + format_double(stream.max_lambda()),
                                hi);
  }
  const auto& pts = stream.points;
  auto it = std::upper_bound(pts.begin(), pts.end(), lo,
                             [](double v, const CoefficientPoint& p) { return v < p.lambda; });
  cplx sum = 0.0;
  for (; it != pts.end() && it->lambda < hi; ++it) sum += it->a * weight(profile, it->lambda / x);
  return sum;
}

cplx main_term_residues(const FunctionalEquationSpec& spec, const WeightProfile& profile, double x) {
  if (!(x > 0.0)) throw DomainError("main_term_residues: x must be positive");
  const double logX = std::log(x);
  cplx total = 0.0;
  for (std::size_t idx = 0; idx < spec.poles.size(); ++idx) {
    const auto& pole = spec.poles[idx];
    if (pole.order < 1 || static_cast<int>(pole.principalPart.size()) != pole.order) {
      throw DomainError("main_term_residues: incomplete principal part for pole " + std::to_string(idx));
    }
    const int ord = pole.order;
    std::vector<cplx> moments(ord);
    for (int i = 0; i < ord; ++i) moments[i] = mellin_derivative(profile, pole.location, i);
    const cplx xv = std::exp(pole.location * logX);
    for (int m = 0; m < ord; ++m) {
      const int power = ord - m;  // coefficient of (s - v)^{-power}
      cplx inner = 0.0;
      double iFact = 1.0;
      for (int i = 0; i < power; ++i) {
        if (i > 0) iFact *= i;
        const int j = power - 1 - i;
        double jFact = 1.0;
        for (int t = 2; t <= j; ++t) jFact *= t;
        inner += moments[i] / iFact * std::pow(logX, j) / jFact;
      }
      total += pole.principalPart[m] * xv * inner;
    }
  }
  return total;
}

cplx main_term_contour(const FunctionalEquationSpec& spec, const WeightProfile& profile, double x,
                       const std::function<cplx(cplx)>& phiEval, double radius) {
  if (!phiEval) throw DomainError("main_term_contour: no evaluator for phi(s)");
  const double R = radius > 0.0 ? radius : spec.poleRadius;
  const double logX = std::log(x);
  auto g = [&](double theta) {
    const cplx s = std::polar(R, theta);
    return phiEval(s) * mellin(profile, s) * std::exp(s * logX) * s;
  };
  // Trapezoid on the circle; each doubling only adds the odd nodes.
  std::size_t n = 32;
  cplx sum = 0.0;
  double absSum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx v = g(2.0 * kPi * i / n);
    sum += v;
    absSum += std::abs(v);
  }
  cplx prev = sum / static_cast<double>(n);
  while (n < (std::size_t{1} << 16)) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx v = g(2.0 * kPi * (2 * i + 1) / (2 * n));
      sum += v;
      absSum += std::abs(v);
    }
    n *= 2;
    const cplx cur = sum / static_cast<double>(n);
    const double scale = absSum / n;
    if (std::abs(cur - prev) <= 1e-10 * std::abs(cur) + 1e-14 * scale) return cur;
    prev = cur;
  }
  throw NumericError("main_term_contour: trapezoid rule did not settle by 2^16 nodes", std::abs(prev));
}

std::size_t oscillatory_node_count(const WeightProfile& profile, double exponentBase, double phaseScale) {
  const auto [lo, hi] = profile.support();
  return node_count(lo, hi, exponentBase, phaseScale);
}

cplx oscillatory_integral(const WeightProfile& profile, double exponentBase, double phaseScale,
                          cplx powerExponent, cplx phaseOffset) {
  if (!(phaseScale >= 0.0)) throw DomainError("oscillatory_integral: phaseScale must be >= 0");
  UQuadrature quad(profile, exponentBase, powerExponent, 0.0);
  cplx out;
  batch_integrals(quad, phaseScale, phaseOffset, 1, &out);
  return out;
}

IKernelValue i_kernel(const DerivedConstants& c, const ExpansionCoefficients& coeffs, const WeightProfile& profile,
                      double y, int J) {
  if (!(y > 0.0)) throw DomainError("i_kernel: y must be positive");
  if (J < 1 || J > coeffs.J) throw DomainError("i_kernel: J must be in [1, coeffs.J]");
  const double beta = 1.0 / (2.0 * c.A);
  const double hy = c.h * y;
  UQuadrature quad(profile, beta, c.a, -beta);
  cplx q[kMaxExpansionTerms];
  batch_integrals(quad, std::pow(hy, beta), c.k * kPi, J, q);
  cplx sum = 0.0;
  for (int j = 0; j < J; ++j) sum += coeffs.e[j] * std::exp((c.a - j * beta) * std::log(hy)) * q[j];
  IKernelValue out;
  out.value = y / (2.0 * c.A) * sum;
  out.remainderScale = std::pow(y, 1.0 - c.vartheta() - (J - 0.5) * beta) / profile.L;
  return out;
}

int default_series_terms(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                         const ExpansionCoefficients& coeffs) {
  const int j0 = 1 + ceil_plus(2.0 * c.A * (spec.sigmaStar - c.vartheta()) + 0.5);
  return std::min(j0, coeffs.J);
}

// ---------------------------------------------------------------------------

IbpBound::IbpBound(const WeightProfile& profile, double A, cplx p, cplx c) {
  coshImC_ = std::cosh(c.imag());
  const double twoA = 2.0 * A;
  const double beta = 1.0 / twoA;
  const auto [uLo, uHi] = profile.support();
  const double wLo = std::pow(uLo, beta), wHi = std::pow(uHi, beta);
  const cplx q = twoA * p + twoA - 1.0;
  const auto& rule = gauss_legendre(kMassNodes);
  const double mid = 0.5 * (wLo + wHi), half = 0.5 * (wHi - wLo);
  std::array<double, kMaxDerivativeOrder + 1> mass{};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double w = mid + half * rule.nodes[i];
    const double u = std::pow(w, twoA);
    // derivatives of g(w) = w^{2A}, phi(g), G = phi o g, and w^q
    std::array<cplx, kMaxDerivativeOrder + 1> gd{};
    for (int m = 1; m <= kMaxDerivativeOrder; ++m) gd[m] = falling(twoA, m) * std::pow(w, twoA - m);
    const BellTable bell = bell_table(gd);
    std::array<double, kMaxDerivativeOrder + 1> phiD{};
    for (int k = 0; k <= kMaxDerivativeOrder; ++k) phiD[k] = weight_derivative(profile, k, u);
    std::array<cplx, kMaxDerivativeOrder + 1> G{};
    G[0] = phiD[0];
    for (int n = 1; n <= kMaxDerivativeOrder; ++n) {
      cplx acc = 0.0;
      for (int k = 1; k <= n; ++k) acc += phiD[k] * bell[n][k];
      G[n] = acc;
    }
    std::array<cplx, kMaxDerivativeOrder + 1> P{};
    for (int m = 0; m <= kMaxDerivativeOrder; ++m) P[m] = falling(q, m) * std::exp((q - static_cast<double>(m)) * std::log(w));
    for (int r = 0; r <= kMaxDerivativeOrder; ++r) {
      cplx acc = 0.0;
      double binom = 1.0;
      for (int t = 0; t <= r; ++t) {
        acc += binom * G[t] * P[r - t];
        binom = binom * (r - t) / (t + 1);
      }
      mass[r] += rule.weights[i] * half * twoA * std::abs(acc);
    }
  }
  for (int r = 0; r <= kMaxDerivativeOrder; ++r) mass_[r] = kMassSafety * mass[r];
}

double IbpBound::bound(double Y, int rLow, int rFixed) const {
  if (rFixed > 0) return coshImC_ * mass_[rFixed] * std::pow(Y, -rFixed);
  double best = std::numeric_limits<double>::infinity();
  double yPow = std::pow(Y, -std::max(rLow, 0));
  for (int r = std::max(rLow, 0); r <= kMaxDerivativeOrder; ++r) {
    best = std::min(best, mass_[r] * yPow);
    yPow /= Y;
  }
  return coshImC_ * best;
}

// ---------------------------------------------------------------------------

TruncatedSum voronoi_series(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                            const ExpansionCoefficients& coeffs, const CoefficientStream& dualStream,
                            const WeightProfile& profile, double x, const TruncationPolicy& policy, int J) {
  if (J < 1 || J > coeffs.J) throw DomainError("voronoi_series: J must be in [1, coeffs.J]");
  return run_expansion(spec, consts, coeffs.e, dualStream, profile, x, policy, J, true);
}

cplx leading_scalar(const DerivedConstants& c, double x) {
  return c.omega * c.e0 / (2.0 * c.A * c.h) * std::exp((1.0 + c.a) * std::log(c.h * x));
}

TruncatedSum leading_term(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                          const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                          const TruncationPolicy& policy) {
  return run_expansion(spec, consts, {consts.e0}, dualStream, profile, x, policy, 1, true);
}

TruncatedSum s_phi0(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                    const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                    const TruncationPolicy& policy) {
  // With e = {1} and no omega the scalar is (hx)^{1+a}/(2Ah); strip it.
  const cplx scal = std::exp((1.0 + consts.a) * std::log(consts.h * x)) / (2.0 * consts.A * consts.h);
  TruncationPolicy scaled = policy;
  scaled.tolerance = policy.tolerance * std::abs(scal);
  TruncatedSum t = run_expansion(spec, consts, {1.0}, dualStream, profile, x, scaled, 1, false);
  t.value /= scal;
  t.tailBound /= std::abs(scal);
  return t;
}

cplx s_phi0_head(const DerivedConstants& c, const CoefficientStream& dualStream, const WeightProfile& profile,
                 double x, std::size_t N) {
  const auto& dual = dualStream.dual();
  if (N > dual.size()) {
    throw InsufficientDataError("s_phi0_head: fewer dual terms than requested", static_cast<double>(N));
  }
  const double beta = 1.0 / (2.0 * c.A);
  const double hx = c.h * x;
  UQuadrature quad(profile, beta, c.a, 0.0);
  cplx total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double mu = dual[n].lambda;
    cplx q;
    batch_integrals(quad, std::pow(hx * mu, beta), c.k * kPi, 1, &q);
    total += dual[n].a * std::exp(c.a * std::log(mu)) * q;
  }
  return total;
}

double s_phi0_tail_bound(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                         const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                         std::size_t N) {
  const auto& dual = dualStream.dual();
  const double beta = 1.0 / (2.0 * c.A);
  const int r0 = ceil_plus(2.0 * c.A * (spec.sigmaStar - c.vartheta()));
  const IbpBound ibp(profile, c.A, c.a, c.k * kPi);
  const double hx = c.h * x;
  double sum = 0.0;
  for (std::size_t n = N; n < dual.size(); ++n) {
    const double mu = dual[n].lambda;
    sum += std::abs(dual[n].a) * std::pow(mu, -c.vartheta()) * ibp.bound(std::pow(hx * mu, beta), r0);
  }
  if (!dual.empty()) {
    const double density = end_density(dual);
    const double muM = dual.back().lambda;
    double best = std::numeric_limits<double>::infinity();
    for (int r = r0; r <= kMaxDerivativeOrder; ++r) {
      const double sExp = c.vartheta() + r * beta;
      if (!(sExp > spec.sigmaStar)) continue;
      best = std::min(best, ibp.derivative_mass(r) * std::pow(hx, -r * beta) *
                                beyond_data(density, muM, sExp, spec.sigmaStar));
    }
    sum += best;
  }
  return sum;
}

// ---------------------------------------------------------------------------

VoronoiEngine::VoronoiEngine(FunctionalEquationSpec spec, CoefficientStream stream, int J)
    : spec_(std::move(spec)), consts_(derive_constants(spec_)), stream_(std::move(stream)) {
  validate_stream(stream_);
  int fitJ = std::clamp(J, 1, kMaxExpansionTerms);
  for (;;) {
    try {
      coeffs_ = expansion_coeffs(spec_, consts_, fitJ);
      break;
    } catch (const NumericError&) {
      if (fitJ == 1) throw;
      --fitJ;
    }
  }
  J_ = std::min(J, default_series_terms(spec_, consts_, coeffs_));
  J_ = std::max(J_, 1);
}

cplx VoronoiEngine::s_phi(const WeightProfile& profile, double x) const {
  return direct_local_sum(stream_, profile, x) - main_term_residues(spec_, profile, x);
}

VoronoiEvaluation VoronoiEngine::evaluate(const WeightProfile& profile, double x, const TruncationPolicy& policy,
                                          bool withSeries) const {
  VoronoiEvaluation ev;
  ev.x = x;
  ev.J = J_;
  ev.emptyWindow = window_count(stream_, profile, x) == 0;
  ev.directSum = direct_local_sum(stream_, profile, x);
  ev.mainTermResidues = main_term_residues(spec_, profile, x);
  ev.sPhi = ev.directSum - ev.mainTermResidues;
  try {
    const auto lead = leading_term(spec_, consts_, stream_, profile, x, policy);
    ev.leadingTerm = lead.value;
    ev.leadingTailBound = lead.tailBound;
    ev.leadingTermCount = lead.termCount;
    ev.errorRatio = std::abs(ev.sPhi - ev.leadingTerm) /
                    (std::pow(x, 1.0 - consts_.vartheta() - 1.0 / (2.0 * consts_.A)) / profile.L);
    if (withSeries) {
      const auto ser = voronoi_series(spec_, consts_, coeffs_, stream_, profile, x, policy, J_);
      ev.seriesValue = ser.value;
      ev.tailBound = ser.tailBound;
      ev.termCount = ser.termCount;
    }
  } catch (const TruncationError& e) {
    ev.truncationFailed = true;
    ev.tailBound = e.achievedBound();
    ev.note = e.what();
  } catch (const OscillationError& e) {
    ev.truncationFailed = true;
    ev.note = e.what();
  }
  return ev;
}

// ---------------------------------------------------------------------------

void write_evaluations_csv(const std::vector<VoronoiEvaluation>& rows, std::ostream& out) {
  out << "x,directRe,directIm,residueRe,residueIm,sPhiRe,sPhiIm,leadingRe,leadingIm,seriesRe,seriesIm,"
         "tailBound,termCount,errorRatio,emptyWindow,truncationFailed\n";
  for (const auto& r : rows) {
    out << format_double(r.x);
    for (cplx v : {r.directSum, r.mainTermResidues, r.sPhi, r.leadingTerm, r.seriesValue}) {
      out << ',' << format_double(v.real()) << ',' << format_double(v.imag());
    }
    out << ',' << format_double(r.tailBound) << ',' << r.termCount << ',' << format_double(r.errorRatio) << ','
        << (r.emptyWindow ? 1 : 0) << ','
        << (r.truncationFailed ? 1 : 0) << '\n';
  }
}

std::string evaluations_to_json(const std::vector<VoronoiEvaluation>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  auto pair = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  for (const auto& r : rows) {
    arr.push_back({{"x", r.x},
                   {"directSum", pair(r.directSum)},
                   {"mainTermResidues", pair(r.mainTermResidues)},
                   {"sPhi", pair(r.sPhi)},
                   {"leadingTerm", pair(r.leadingTerm)},
                   {"seriesValue", pair(r.seriesValue)},
                   {"tailBound", r.tailBound},
                   {"termCount", r.termCount},
                   {"leadingTailBound", r.leadingTailBound},
                   {"leadingTermCount", r.leadingTermCount},
                   {"errorRatio", r.errorRatio},
                   {"J", r.J},
                   {"emptyWindow", r.emptyWindow},
                   {"truncationFailed", r.truncationFailed}});
  }
  return arr.dump();
}

std::vector<VoronoiEvaluation> evaluations_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("evaluation JSON: ") + e.what(), 1);
  }
  if (arr.is_object() && arr.contains("rows")) arr = arr.at("rows");
  if (!arr.is_array()) throw DataError("evaluation JSON: expected an array of rows");
  auto pair = [](const nlohmann::json& j) { return cplx(j.at(0).get<double>(), j.at(1).get<double>()); };
  std::vector<VoronoiEvaluation> rows;
  try {
    for (const auto& j : arr) {
      VoronoiEvaluation r;
      r.x = j.at("x").get<double>();
      r.directSum = pair(j.at("directSum"));
      r.mainTermResidues = pair(j.at("mainTermResidues"));
      r.sPhi = pair(j.at("sPhi"));
      r.leadingTerm = pair(j.at("leadingTerm"));
      r.seriesValue = pair(j.at("seriesValue"));
      r.tailBound = j.at("tailBound").get<double>();
      r.termCount = j.at("termCount").get<std::size_t>();
      r.leadingTailBound = j.at("leadingTailBound").get<double>();
      r.leadingTermCount = j.at("leadingTermCount").get<std::size_t>();
      r.errorRatio = j.at("errorRatio").get<double>();
      r.J = j.at("J").get<int>();
      r.emptyWindow = j.at("emptyWindow").get<bool>();
      r.truncationFailed = j.at("truncationFailed").get<bool>();
      rows.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("evaluation JSON: ") + e.what());
  }
  return rows;
}

}  // namespace localmean
