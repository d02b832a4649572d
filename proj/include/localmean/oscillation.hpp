#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "localmean/feq.hpp"
#include "localmean/providers.hpp"
#include "localmean/voronoi.hpp"
#include "localmean/weight.hpp"

namespace localmean {

// K(t) = (1 - |t|)(1 + tau cos(2 rho t + theta)) on [-1, 1].
struct KernelParams {
  double tau = 1.0;
  double rho = 0.0;
  double theta = 0.0;
  double alpha = 1.0;
};

struct DetectionParams {
  double delta = 0.1;
  double c0 = 2.0;
  std::size_t N = 50;          // head of S_{phi,0} kept exactly
  std::size_t TGridCount = 64;
  double alpha = 0.0;          // <= 0: smallest alpha from the explicit bound
  double X0 = 0.0;             // <= 0: (2 alpha)^{2A}
};

void validate_detection(const DetectionParams& d);

double kernel(const KernelParams& params, double t);

// sin(z) / z with the limit 1 at z = 0.
double sinc(double z);

// int_{-1}^{1} K(t) e^{2 i upsilon t} dt in closed form.
cplx kernel_transform(const KernelParams& params, double upsilon);

// Same integral by composite Gauss-Legendre on [-1, 0] and [0, 1].
cplx kernel_transform_quadrature(const KernelParams& params, double upsilon);

// rho / alpha = (h mu_1)^{1/(2A)}.
double first_frequency(const DerivedConstants& consts, const CoefficientStream& stream);

// Smallest alpha for which the explicit bound on the n <= N error of the
// kernel-averaged head stays below delta / L.
double select_alpha(const DerivedConstants& consts, const CoefficientStream& stream, const WeightProfile& profile,
                    const DetectionParams& detection);

// The detection constants after defaults are filled in.
struct ResolvedDetection {
  DetectionParams params;
  double alpha = 0.0;
  double X0 = 0.0;
  double rho = 0.0;
  double theta = 0.0;  // kappa pi
};

ResolvedDetection resolve_detection(const DerivedConstants& consts, const CoefficientStream& stream,
                                    const WeightProfile& profile, const DetectionParams& detection);

struct KernelAverage {
  double T = 0.0;
  cplx numeric{};        // tau |b1| / (b1 mu1^{i xi}) int S_{phi,0}^{<=N}((T + 2 alpha t)^{2A}) K(t) dt
  cplx analytic{};       // |b1| / (2 mu1^vartheta) cos((h mu1)^{1/(2A)} T + i eta pi) int phi
  double remainderBound = 0.0;  // bound on the n > N part of the same integral
  std::size_t nodes = 0;
};

KernelAverage kernel_average(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                             const CoefficientStream& stream, const WeightProfile& profile, double T,
                             const KernelParams& params, const DetectionParams& detection);

// The n <= N part again, through the transform identity instead of the
// t-quadrature.
cplx kernel_average_by_transform(const DerivedConstants& consts, const CoefficientStream& stream,
                                 const WeightProfile& profile, double T, const KernelParams& params,
                                 std::size_t N);

// T = 2 n pi / (h mu_1)^{1/(2A)} inside [(2X)^{1/(2A)}, (3X)^{1/(2A)}], at most maxCount of them.
std::vector<double> t_grid(const DerivedConstants& consts, const CoefficientStream& stream, double X,
                           std::size_t maxCount);

struct DetectionResult {
  double x = 0.0;
  double windowLow = 0.0;
  double windowHigh = 0.0;
  double xPlus = 0.0;
  double xMinus = 0.0;
  double valuePlus = 0.0;
  double valueMinus = 0.0;
  double scale = 0.0;      // x^{1 - vartheta} / L
  bool success = false;    // valuePlus > 0 > valueMinus
  bool crossingFound = false;
  double crossing = 0.0;   // zero of the functional between xMinus and xPlus
  std::size_t gridPoints = 0;
  double L = 0.0;
  std::string note;
};

// Re(varsigma^-1 S_phi(t) / (mu_1 h t)^{i xi}) with the weight anchored at x.
double detection_functional(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                            const CoefficientStream& stream, const WeightProfile& profile, double t);

DetectionResult detect_extrema(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                               const CoefficientStream& stream, double x, const DetectionParams& detection);

enum class ZeroPolicy { SkipZeros };

struct ScanWindow {
  double center = 0.0;
  bool found = false;
  double xPlus = 0.0;   // lambda of a positive term in the window (0 if none)
  double xMinus = 0.0;  // lambda of a negative term in the window (0 if none)
};

struct SignChangeReport {
  double xLow = 0.0;
  double xHigh = 0.0;
  std::vector<ScanWindow> windows;
  std::size_t nStar = 0;
  std::size_t nPlus = 0;
  std::size_t nMinus = 0;
  double maxGapNormalized = 0.0;   // max (lambda_{n+1} - lambda_n) / lambda_n^{exponent}
  double maxStretch = 0.0;         // longest part of [xLow, xHigh] covered only by windows without a change
  double maxStretchNormalized = 0.0;
  double c0 = 0.0;
  double exponent = 0.0;
};

SignChangeReport sign_changes(const CoefficientStream& stream, double xMax, ZeroPolicy policy = ZeroPolicy::SkipZeros);

// Windows [x - c0 x^e, x + c0 x^e] with centers stepping by 2 c0 x^e from xLow.
SignChangeReport window_scan(const CoefficientStream& stream, double xLow, double xHigh, double c0, double exponent);

// Same test at caller-chosen centers.
SignChangeReport window_scan_at(const CoefficientStream& stream, const std::vector<double>& centers, double c0,
                                double exponent);

// Smallest c0 for which every window around the given centers holds a sign change.
double minimal_c0(const CoefficientStream& stream, const std::vector<double>& centers, double exponent);

// max over lambda_n in [lo, hi] of (lambda_{n+1} - lambda_n) / lambda_n^{1 - 1/(2A)}.
double gap_scan(const CoefficientStream& stream, double lo, double hi, double A);

// count points x_i = lo (hi/lo)^{i/(count-1)}.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

std::string report_to_json(const SignChangeReport& report);
void write_report_csv(const SignChangeReport& report, std::ostream& out);

}  // namespace localmean
