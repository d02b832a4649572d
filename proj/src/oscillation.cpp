#include "localmean/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "json.hpp"
#include "localmean/errors.hpp"
#include "localmean/quadrature.hpp"

namespace localmean {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kPanelNodes = 32;
constexpr double kAlphaSafety = 1.01;
constexpr double kImagTolerance = 1e-12;

// Composite Gauss-Legendre over [a, b] with `panels` equal pieces.
template <class F>
auto panel_integrate(F&& f, double a, double b, std::size_t panels) {
  const double w = (b - a) / static_cast<double>(panels);
  decltype(f(a)) sum{};
  for (std::size_t p = 0; p < panels; ++p) sum += integrate_gl(f, a + p * w, a + (p + 1) * w, kPanelNodes);
  return sum;
}

std::size_t panels_for_phase(double phase) { return 1 + static_cast<std::size_t>(std::ceil(phase / 8.0)); }

double mu1(const CoefficientStream& stream) {
  const auto& dual = stream.dual();
  if (dual.empty()) throw DataError("stream has no dual coefficients");
  return dual.front().lambda;
}

cplx b1(const CoefficientStream& stream) {
  const auto& dual = stream.dual();
  if (dual.empty()) throw DataError("stream has no dual coefficients");
  return dual.front().a;
}

// tau |b1| / (b1 mu1^{i xi})
cplx normalizer(const DerivedConstants& c, const CoefficientStream& stream, double tau) {
  const cplx b = b1(stream);
  return tau * std::abs(b) / (b * std::exp(cplx(0.0, c.xi() * std::log(mu1(stream)))));
}

double real_part_checked(const CoefficientPoint& p, std::size_t index) {
  const double mag = std::abs(p.a);
  if (std::abs(p.a.imag()) > kImagTolerance * mag) {
    throw CoefficientTypeError("sign scan needs real coefficients, found imaginary part " + format_double(p.a.imag()),
                               index);
  }
  return p.a.real();
}

// Adjacent nonzero terms of opposite sign, as lambda pairs.
struct Flip {
  double lo;
  double hi;
};

struct SignData {
  std::vector<Flip> flips;
  std::vector<double> positive;
  std::vector<double> negative;
};

SignData collect_signs(const CoefficientStream& stream) {
  SignData out;
  int prevSign = 0;
  double prevLambda = 0.0;
  for (std::size_t i = 0; i < stream.points.size(); ++i) {
    const auto& p = stream.points[i];
    const double v = real_part_checked(p, i + 1);
    if (v == 0.0) continue;
    const int sign = v > 0.0 ? 1 : -1;
    (sign > 0 ? out.positive : out.negative).push_back(p.lambda);
    if (prevSign != 0 && sign != prevSign) out.flips.push_back({prevLambda, p.lambda});
    prevSign = sign;
    prevLambda = p.lambda;
  }
  return out;
}

// First element of a sorted vector inside [lo, hi], or 0.
double first_in(const std::vector<double>& v, double lo, double hi) {
  auto it = std::lower_bound(v.begin(), v.end(), lo);
  return (it != v.end() && *it <= hi) ? *it : 0.0;
}

ScanWindow test_window(const SignData& data, double center, double lo, double hi) {
  ScanWindow w;
  w.center = center;
  auto it = std::lower_bound(data.flips.begin(), data.flips.end(), lo,
                             [](const Flip& f, double v) { return f.lo < v; });
  w.found = it != data.flips.end() && it->hi <= hi;
  w.xPlus = first_in(data.positive, lo, hi);
  w.xMinus = first_in(data.negative, lo, hi);
  return w;
}

void count_range(const CoefficientStream& stream, double lo, double hi, SignChangeReport& r) {
  int prevSign = 0;
  for (std::size_t i = 0; i < stream.points.size(); ++i) {
    const auto& p = stream.points[i];
    if (p.lambda < lo) continue;
    if (p.lambda > hi) break;
    const double v = real_part_checked(p, i + 1);
    if (v == 0.0) continue;
    const int sign = v > 0.0 ? 1 : -1;
    (sign > 0 ? r.nPlus : r.nMinus) += 1;
    if (prevSign != 0 && sign != prevSign) ++r.nStar;
    prevSign = sign;
  }
}

double max_gap(const CoefficientStream& stream, double lo, double hi, double exponent) {
  double best = 0.0;
  const auto& pts = stream.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].lambda < lo) continue;
    if (pts[i].lambda > hi) break;
    best = std::max(best, (pts[i + 1].lambda - pts[i].lambda) / std::pow(pts[i].lambda, exponent));
  }
  return best;
}

// Longest run of consecutive windows without a change, clipped to [lo, hi].
void stretch(SignChangeReport& r, double c0, double exponent, double lo, double hi) {
  double runLo = 0.0;
  bool inRun = false;
  auto close = [&](double runHi) {
    const double a = std::max(runLo, lo);
    const double b = std::min(runHi, hi);
    if (b > a && b - a > r.maxStretch) {
      r.maxStretch = b - a;
      r.maxStretchNormalized = (b - a) / std::pow(0.5 * (a + b), exponent);
    }
  };
  double lastHi = 0.0;
  for (const auto& w : r.windows) {
    const double half = c0 * std::pow(w.center, exponent);
    if (!w.found) {
      if (!inRun) runLo = w.center - half;
      inRun = true;
      lastHi = w.center + half;
    } else if (inRun) {
      close(lastHi);
      inRun = false;
    }
  }
  if (inRun) close(lastHi);
}

}  // namespace

void validate_detection(const DetectionParams& d) {
  if (!(d.delta > 0.0)) throw DomainError("detection: delta must be positive");
  if (!(d.c0 > 0.0)) throw DomainError("detection: c0 must be positive");
  if (d.N == 0) throw DomainError("detection: N must be positive");
  if (d.TGridCount == 0) throw DomainError("detection: TGridCount must be positive");
}

double kernel(const KernelParams& p, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("kernel: t must lie in [-1, 1]");
  return (1.0 - std::abs(t)) * (1.0 + p.tau * std::cos(2.0 * p.rho * t + p.theta));
}

double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

cplx kernel_transform(const KernelParams& p, double upsilon) {
  const double s0 = sinc(upsilon);
  const double sp = sinc(upsilon + p.rho);
  const double sm = sinc(upsilon - p.rho);
  const cplx e = std::polar(1.0, p.theta);
  return s0 * s0 + 0.5 * p.tau * e * (sp * sp) + 0.5 * p.tau * std::conj(e) * (sm * sm);
}

cplx kernel_transform_quadrature(const KernelParams& p, double upsilon) {
  auto f = [&](double t) { return kernel(p, t) * std::polar(1.0, 2.0 * upsilon * t); };
  const std::size_t panels = panels_for_phase(2.0 * (std::abs(upsilon) + std::abs(p.rho)));
  return panel_integrate(f, -1.0, 0.0, panels) + panel_integrate(f, 0.0, 1.0, panels);
}

double first_frequency(const DerivedConstants& c, const CoefficientStream& stream) {
  return std::pow(c.h * mu1(stream), 1.0 / (2.0 * c.A));
}

double select_alpha(const DerivedConstants& c, const CoefficientStream& stream, const WeightProfile& profile,
                    const DetectionParams& d) {
  validate_detection(d);
  const auto& dual = stream.dual();
  const std::size_t N = std::min(d.N, dual.size());
  const double beta = 1.0 / (2.0 * c.A);
  const double r1 = first_frequency(c, stream);
  const double uLow = 1.0 - 1.0 / profile.L;
  // sinc^2(z) <= 1/z^2 on every non-resonant piece of the transform
  double sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double v = std::pow(c.h * dual[n].lambda * uLow, beta);
    double e = 1.0 / (v * v) + 0.5 / ((v + r1) * (v + r1));
    if (n > 0) {
      if (!(v > r1)) throw DomainError("select_alpha: dual frequency " + std::to_string(n + 1) + " is not above the first");
      e += 0.5 / ((v - r1) * (v - r1));
    }
    sum += std::abs(dual[n].a) * std::pow(dual[n].lambda, -c.vartheta()) * e;
  }
  const auto [lo, hi] = profile.support();
  const double uPow = std::max(std::pow(lo, -c.vartheta()), std::pow(hi, -c.vartheta()));
  const double bound = sum * std::cosh(c.eta() * kPi) * uPow * weight_integral(profile);
  return std::sqrt(kAlphaSafety * bound * profile.L / d.delta);
}

ResolvedDetection resolve_detection(const DerivedConstants& c, const CoefficientStream& stream,
                                    const WeightProfile& profile, const DetectionParams& d) {
  validate_detection(d);
  ResolvedDetection r;
  r.params = d;
  r.alpha = d.alpha > 0.0 ? d.alpha : select_alpha(c, stream, profile, d);
  r.X0 = d.X0 > 0.0 ? d.X0 : std::pow(2.0 * r.alpha, 2.0 * c.A);
  r.rho = first_frequency(c, stream) * r.alpha;
  r.theta = c.kappa() * kPi;
  r.params.alpha = r.alpha;
  r.params.X0 = r.X0;
  return r;
}

KernelAverage kernel_average(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                             const CoefficientStream& stream, const WeightProfile& profile, double T,
                             const KernelParams& params, const DetectionParams& d) {
  validate_detection(d);
  if (!(T > 2.0 * params.alpha)) throw DomainError("kernel_average: T must exceed 2 alpha");
  const auto& dual = stream.dual();
  const std::size_t N = std::min(d.N, dual.size());
  const double twoA = 2.0 * c.A;
  const double beta = 1.0 / twoA;

  const double rN = std::pow(c.h * dual[N - 1].lambda * (1.0 + 1.0 / profile.L), beta);
  const std::size_t panels = panels_for_phase(2.0 * params.alpha * rN + 2.0 * std::abs(params.rho));
  auto f = [&](double t) {
    return s_phi0_head(c, stream, profile, std::pow(T + 2.0 * params.alpha * t, twoA), N) * kernel(params, t);
  };
  KernelAverage out;
  out.T = T;
  out.nodes = 2 * panels * kPanelNodes;
  const cplx scal = normalizer(c, stream, params.tau);
  out.numeric = scal * (panel_integrate(f, -1.0, 0.0, panels) + panel_integrate(f, 0.0, 1.0, panels));

  const double r1 = first_frequency(c, stream);
  out.analytic = std::abs(b1(stream)) / (2.0 * std::pow(mu1(stream), c.vartheta())) *
                 std::cos(cplx(r1 * T, c.eta() * kPi)) * weight_integral(profile);

  const double xMin = std::pow(T - 2.0 * params.alpha, twoA);
  out.remainderBound = kernel_transform(params, 0.0).real() * s_phi0_tail_bound(spec, c, stream, profile, xMin, N);
  return out;
}

cplx kernel_average_by_transform(const DerivedConstants& c, const CoefficientStream& stream,
                                 const WeightProfile& profile, double T, const KernelParams& params,
                                 std::size_t N) {
  const auto& dual = stream.dual();
  N = std::min(N, dual.size());
  const double beta = 1.0 / (2.0 * c.A);
  const auto [lo, hi] = profile.support();
  const cplx kPhase = c.k * kPi;
  cplx total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double mu = dual[n].lambda;
    const double base = std::pow(c.h * mu, beta);
    auto g = [&](double u) {
      const double w = weight(profile, u);
      if (w == 0.0) return cplx{};
      const double Y = base * std::pow(u, beta);
      const double ups = Y * params.alpha;
      const cplx ph = Y * T + kPhase;
      const cplx inner = 0.5 * (std::exp(cplx(0.0, 1.0) * ph) * kernel_transform(params, ups) +
                                std::exp(-cplx(0.0, 1.0) * ph) * kernel_transform(params, -ups));
      return w * std::exp(c.a * std::log(u)) * inner;
    };
    const double phase = base * (std::pow(hi, beta) - std::pow(lo, beta)) * (T + 2.0 * params.alpha);
    total += dual[n].a * std::exp(c.a * std::log(mu)) * panel_integrate(g, lo, hi, 2 * panels_for_phase(phase));
  }
  return normalizer(c, stream, params.tau) * total;
}

std::vector<double> t_grid(const DerivedConstants& c, const CoefficientStream& stream, double X,
                           std::size_t maxCount) {
  const double beta = 1.0 / (2.0 * c.A);
  const double r1 = first_frequency(c, stream);
  const double lo = std::pow(2.0 * X, beta);
  const double hi = std::pow(3.0 * X, beta);
  std::vector<double> out;
  for (double n = std::ceil(lo * r1 / (2.0 * kPi)); out.size() < maxCount; n += 1.0) {
    const double T = 2.0 * n * kPi / r1;
    if (T > hi) break;
    out.push_back(T);
  }
  return out;
}

double detection_functional(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                            const CoefficientStream& stream, const WeightProfile& profile, double t) {
  const cplx s = direct_local_sum(stream, profile, t) - main_term_residues(spec, profile, t);
  const cplx varsigma = sign_scalar(c, b1(stream));
  const cplx twist = std::exp(cplx(0.0, c.xi() * std::log(mu1(stream) * c.h * t)));
  return (s / (varsigma * twist)).real();
}

DetectionResult detect_extrema(const FunctionalEquationSpec& spec, const DerivedConstants& c,
                               const CoefficientStream& stream, double x, const DetectionParams& d) {
  validate_detection(d);
  if (!(x > 0.0)) throw DomainError("detect_extrema: x must be positive");
  const WeightProfile profile = WeightProfile::make(d.delta, x, c.A);
  const ResolvedDetection rd = resolve_detection(c, stream, profile, d);
  const double exponent = 1.0 - 1.0 / (2.0 * c.A);
  const double half = d.c0 * std::pow(x, exponent);

  DetectionResult r;
  r.x = x;
  r.L = profile.L;
  r.windowLow = x - half;
  r.windowHigh = x + half;
  r.scale = std::pow(x, 1.0 - c.vartheta()) / profile.L;
  if (r.windowLow < rd.X0) {
    throw ThresholdError("detect_extrema: window starts at " + format_double(r.windowLow) + " below X0 = " +
                         format_double(rd.X0));
  }

  const double period = 4.0 * kPi * c.A / first_frequency(c, stream) * std::pow(x, exponent);
  const double step = std::min(period / 16.0, x / (4.0 * profile.L));
  const auto count = static_cast<std::size_t>(std::ceil((r.windowHigh - r.windowLow) / step));
  std::vector<double> ts(count + 1), vs(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    ts[i] = r.windowLow + (r.windowHigh - r.windowLow) * static_cast<double>(i) / static_cast<double>(count);
    vs[i] = detection_functional(spec, c, stream, profile, ts[i]);
  }
  r.gridPoints = count + 1;
  const auto iMax = static_cast<std::size_t>(std::max_element(vs.begin(), vs.end()) - vs.begin());
  const auto iMin = static_cast<std::size_t>(std::min_element(vs.begin(), vs.end()) - vs.begin());
  r.xPlus = ts[iMax];
  r.valuePlus = vs[iMax];
  r.xMinus = ts[iMin];
  r.valueMinus = vs[iMin];
  r.success = r.valuePlus > 0.0 && r.valueMinus < 0.0;
  if (!r.success) {
    r.note = "no sign change of the functional on the grid";
    return r;
  }

  const std::size_t a = std::min(iMin, iMax);
  const std::size_t b = std::max(iMin, iMax);
  for (std::size_t i = a; i < b; ++i) {
    if ((vs[i] > 0.0) == (vs[i + 1] > 0.0)) continue;
    double lo = ts[i], hi = ts[i + 1];
    double flo = vs[i];
    for (int it = 0; it < 60 && hi - lo > 1e-12 * x; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = detection_functional(spec, c, stream, profile, mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    r.crossingFound = true;
    r.crossing = 0.5 * (lo + hi);
    break;
  }
  return r;
}

SignChangeReport sign_changes(const CoefficientStream& stream, double xMax, ZeroPolicy) {
  SignChangeReport r;
  r.xLow = stream.points.empty() ? 0.0 : stream.points.front().lambda;
  r.xHigh = xMax;
  count_range(stream, -std::numeric_limits<double>::infinity(), xMax, r);
  return r;
}

SignChangeReport window_scan(const CoefficientStream& stream, double xLow, double xHigh, double c0,
                             double exponent) {
  if (!(xLow >= 1.0) || !(xHigh >= xLow) || !(c0 > 0.0)) {
    throw DomainError("window_scan: empty tiling (need 1 <= xLow <= xHigh and c0 > 0)");
  }
  std::vector<double> centers;
  for (double x = xLow;; x += 2.0 * c0 * std::pow(x, exponent)) {
    centers.push_back(x);
    if (x + c0 * std::pow(x, exponent) >= xHigh) break;
  }
  SignChangeReport r = window_scan_at(stream, centers, c0, exponent);
  r.xLow = xLow;
  r.xHigh = xHigh;
  r.nStar = r.nPlus = r.nMinus = 0;
  count_range(stream, xLow, xHigh, r);
  r.maxGapNormalized = max_gap(stream, xLow, xHigh, exponent);
  r.maxStretch = r.maxStretchNormalized = 0.0;
  stretch(r, c0, exponent, xLow, xHigh);
  return r;
}

SignChangeReport window_scan_at(const CoefficientStream& stream, const std::vector<double>& centers, double c0,
                                double exponent) {
  if (centers.empty() || !(c0 > 0.0)) throw DomainError("window_scan: empty tiling");
  const SignData data = collect_signs(stream);
  SignChangeReport r;
  r.c0 = c0;
  r.exponent = exponent;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : centers) {
    const double half = c0 * std::pow(x, exponent);
    r.windows.push_back(test_window(data, x, x - half, x + half));
    lo = std::min(lo, x - half);
    hi = std::max(hi, x + half);
  }
  r.xLow = lo;
  r.xHigh = hi;
  count_range(stream, lo, hi, r);
  r.maxGapNormalized = max_gap(stream, lo, hi, exponent);
  stretch(r, c0, exponent, lo, hi);
  return r;
}

double minimal_c0(const CoefficientStream& stream, const std::vector<double>& centers, double exponent) {
  const SignData data = collect_signs(stream);
  double worst = 0.0;
  for (double x : centers) {
    const double w = std::pow(x, exponent);
    auto it = std::lower_bound(data.flips.begin(), data.flips.end(), x,
                               [](const Flip& f, double v) { return f.hi < v; });
    const auto k = static_cast<std::ptrdiff_t>(it - data.flips.begin());
    double best = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t j = k - 1; j <= k + 1; ++j) {
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(data.flips.size())) continue;
      const auto& f = data.flips[static_cast<std::size_t>(j)];
      best = std::min(best, std::max(x - f.lo, f.hi - x) / w);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double gap_scan(const CoefficientStream& stream, double lo, double hi, double A) {
  const auto& pts = stream.points;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].lambda > pts[i - 1].lambda)) {
      throw DataError("gap_scan: lambda not strictly increasing at index " + std::to_string(i + 1));
    }
  }
  return max_gap(stream, lo, hi, 1.0 - 1.0 / (2.0 * A));
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("log_grid: need 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  if (count == 1) return {lo};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  out.back() = hi;
  return out;
}

std::string report_to_json(const SignChangeReport& r) {
  nlohmann::ordered_json j;
  j["xLow"] = r.xLow;
  j["xHigh"] = r.xHigh;
  j["c0"] = r.c0;
  j["exponent"] = r.exponent;
  j["nStar"] = r.nStar;
  j["nPlus"] = r.nPlus;
  j["nMinus"] = r.nMinus;
  j["maxGapNormalized"] = r.maxGapNormalized;
  j["maxStretch"] = r.maxStretch;
  j["maxStretchNormalized"] = r.maxStretchNormalized;
  auto& ws = j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : r.windows) {
    ws.push_back({{"center", w.center}, {"found", w.found}, {"xPlus", w.xPlus}, {"xMinus", w.xMinus}});
  }
  return j.dump(2);
}

void write_report_csv(const SignChangeReport& r, std::ostream& out) {
  out << "center,found,xPlus,xMinus\n";
  for (const auto& w : r.windows) {
    out << format_double(w.center) << ',' << (w.found ? 1 : 0) << ',' << format_double(w.xPlus) << ','
        << format_double(w.xMinus) << '\n';
  }
}

}  // namespace localmean
