#pragma once

#include <complex>
#include <vector>

#include "localmean/feq.hpp"

namespace localmean {

// log of DeltaTilde(s) / Delta(1 - s) on the continuous log-gamma branch.
// Throws SingularityError when a gamma argument is within 1e-8 of a pole.
cplx log_gamma_ratio(const FunctionalEquationSpec& spec, cplx s);
cplx gamma_ratio(const FunctionalEquationSpec& spec, const DerivedConstants& consts, cplx s);

// F_j(s) = h^{-s} Gamma(2A(s+a) - j) cos(pi A (s+a) + k pi), evaluated in
// log space so |Im s| up to 1e4 does not overflow.
cplx log_f_term(const DerivedConstants& consts, int j, cplx s);
cplx f_term(const DerivedConstants& consts, int j, cplx s);

inline constexpr int kMaxExpansionTerms = 4;

struct FitDiagnostics {
  int j = 0;
  std::vector<double> t;           // fit grid
  std::vector<cplx> raw;           // r_j(t) before extrapolation
  cplx estimate{};
  double spread = 0.0;             // |R(4,4) - R(3,3)| / max(|estimate|, |e0|)
  double residualSlope = 0.0;      // log-log slope of the (j+1)-term residual
};

struct ExpansionCoefficients {
  int J = 1;
  std::vector<cplx> e;
  std::vector<FitDiagnostics> fitDiagnostics;  // one entry per fitted j >= 1
  double sigma0 = 0.0;                         // fit line Re s
};

// Real part of the fit line: vartheta + 1/(4A).
double fit_line_sigma(const DerivedConstants& consts);

ExpansionCoefficients expansion_coeffs(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                                       int J);

// |ratio(s) - sum_{j<terms} e_j F_j(s)| / |F_0(s)|; terms defaults to coeffs.J.
double ratio_residual(const FunctionalEquationSpec& spec, const DerivedConstants& consts,
                      const ExpansionCoefficients& coeffs, cplx s, int terms = -1);

}  // namespace localmean
