#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "localmean/feq.hpp"
#include "localmean/gamma_ratio.hpp"
#include "localmean/providers.hpp"
#include "localmean/weight.hpp"

namespace localmean {

struct TruncationPolicy {
  double tolerance = 1e-6;        // absolute bound on the discarded tail
  int rOrder = 0;                 // 0: best order in [r_min, 8] per term
  std::size_t maxTerms = 2'000'000;
};

struct VoronoiEvaluation {
  double x = 0.0;
  cplx directSum{};
  cplx mainTermResidues{};
  cplx sPhi{};
  cplx leadingTerm{};
  cplx seriesValue{};
  double tailBound = 0.0;         // series tail
  std::size_t termCount = 0;      // series terms
  double leadingTailBound = 0.0;
  std::size_t leadingTermCount = 0;
  double errorRatio = 0.0;        // |sPhi - leadingTerm| / (L^-1 x^{1 - vartheta - 1/(2A)})
  int J = 1;
  bool emptyWindow = false;
  bool truncationFailed = false;
  std::string note;
};

// Sum of a_n phi(lambda_n / x) over the support window. Throws
// InsufficientDataError when the stream stops short of x (1 + 1/L).
cplx direct_local_sum(const CoefficientStream& stream, const WeightProfile& profile, double x);

// Number of lambda_n strictly inside the window; 0 means an empty window.
std::size_t window_count(const CoefficientStream& stream, const WeightProfile& profile, double x);

// Residues of phi(s) phi^(s) x^s from the principal parts, using the
// log-moments int phi(u) u^{v-1} (log u)^i du.
cplx main_term_residues(const FunctionalEquationSpec& spec, const WeightProfile& profile, double x);

// (1/2 pi i) of the same integrand around |s| = radius (spec.poleRadius when
// radius <= 0), trapezoidal rule doubled until the change is below 1e-10.
cplx main_term_contour(const FunctionalEquationSpec& spec, const WeightProfile& profile, double x,
                       const std::function<cplx(cplx)>& phiEval, double radius = 0.0);

// int phi(u) u^p cos(scale * u^beta + offset) du by Gauss-Legendre with
// 96 + 5 ceil(phase variation / 2 pi) nodes; OscillationError past 2^14.
cplx oscillatory_integral(const WeightProfile& profile, double exponentBase, double phaseScale,
                          cplx powerExponent, cplx phaseOffset);

inline constexpr std::size_t kOscillatoryNodeCeiling = std::size_t{1} << 14;
std::size_t oscillatory_node_count(const WeightProfile& profile, double exponentBase, double phaseScale);

struct IKernelValue {
  cplx value{};
  double remainderScale = 0.0;  // L^-1 y^{1 - vartheta - (J - 1/2)/(2A)}
};

IKernelValue i_kernel(const DerivedConstants& consts, const ExpansionCoefficients& coeffs,
                      const WeightProfile& profile, double y, int J);

// Default J for the series: J' + ceil(2A(sigma* - vartheta) + 1/2)_+ with
// J' = 1, clamped to the fitted coefficients.
int default_series_terms(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                         const ExpansionCoefficients& coeffs);

// Integration-by-parts bounds for int phi(u) u^p cos(Y u^{1/(2A)} + c) du.
// After w = u^{1/(2A)} the integral is int F(w) cos(Y w + c) dw with
// F(w) = 2A phi(w^{2A}) w^{2A p + 2A - 1}, so it is at most
// cosh(Im c) Y^-r int |F^(r)|. The integrals of |F^(r)| are measured on a
// dense grid from the exact derivatives.
class IbpBound {
 public:
  IbpBound(const WeightProfile& profile, double A, cplx p, cplx c);

  double derivative_mass(int r) const { return mass_[r]; }
  // Best bound over r in [rLow, 8], or exactly rFixed when > 0.
  double bound(double Y, int rLow = 0, int rFixed = 0) const;

 private:
  std::array<double, kMaxDerivativeOrder + 1> mass_{};
  double coshImC_ = 1.0;
};

struct TruncatedSum {
  cplx value{};
  double tailBound = 0.0;
  std::size_t termCount = 0;
};

// omega sum_n b_n / mu_n I(mu_n x) with the j < J expansion of I.
TruncatedSum voronoi_series(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                            const ExpansionCoefficients& coeffs, const CoefficientStream& dualStream,
                            const WeightProfile& profile, double x, const TruncationPolicy& policy, int J);

// S_{phi,0}(x) truncated by the same policy; value excludes the outer scalar.
TruncatedSum s_phi0(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                    const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                    const TruncationPolicy& policy);

// S_{phi,0}(x) over the first N dual terms only.
cplx s_phi0_head(const DerivedConstants& consts, const CoefficientStream& dualStream,
                 const WeightProfile& profile, double x, std::size_t N);

// Bound on |S_{phi,0}^{>N}(x)| with the order r = ceil(2A(sigma* - vartheta))_+.
double s_phi0_tail_bound(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                         const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                         std::size_t N);

// omega e0 / (2Ah) (hx)^{1 - vartheta + i xi}.
cplx leading_scalar(const DerivedConstants& consts, double x);

TruncatedSum leading_term(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                          const CoefficientStream& dualStream, const WeightProfile& profile, double x,
                          const TruncationPolicy& policy);

// Smallest positive integer strictly greater than v.
int ceil_plus(double v);

// Bundles one instance for repeated evaluation over an x grid.
class VoronoiEngine {
 public:
  VoronoiEngine(FunctionalEquationSpec spec, CoefficientStream stream, int J = 4);

  const FunctionalEquationSpec& spec() const noexcept { return spec_; }
  const DerivedConstants& constants() const noexcept { return consts_; }
  const ExpansionCoefficients& coefficients() const noexcept { return coeffs_; }
  const CoefficientStream& stream() const noexcept { return stream_; }
  int series_terms() const noexcept { return J_; }

  // Direct side only: window sum minus residues.
  cplx s_phi(const WeightProfile& profile, double x) const;

  // Every field; truncation failures are flagged rather than thrown.
  VoronoiEvaluation evaluate(const WeightProfile& profile, double x, const TruncationPolicy& policy,
                             bool withSeries = true) const;

 private:
  FunctionalEquationSpec spec_;
  DerivedConstants consts_;
  ExpansionCoefficients coeffs_;
  CoefficientStream stream_;
  int J_ = 1;
};

void write_evaluations_csv(const std::vector<VoronoiEvaluation>& rows, std::ostream& out);
std::string evaluations_to_json(const std::vector<VoronoiEvaluation>& rows);
// Inverse of evaluations_to_json (a bare array or an object holding "rows");
// the note field is not serialized.
std::vector<VoronoiEvaluation> evaluations_from_json(const std::string& text);

}  // namespace localmean
