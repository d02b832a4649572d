#pragma once

#include <complex>
#include <string>
#include <vector>

namespace localmean {

using cplx = std::complex<double>;

// One factor Gamma(alpha*s + beta) of Delta(s), paired with the dual
// factor Gamma(alpha*s + betaTilde) of the twisted side.
struct GammaFactor {
  double alpha = 0.0;
  cplx beta{};
  cplx betaTilde{};
};

// Principal part of phi(s) at a pole: principalPart[m] is the coefficient of
// (s - location)^-(order - m), so the front entry is the leading one.
struct PoleSpec {
  cplx location{};
  int order = 1;
  std::vector<cplx> principalPart;
};

struct FunctionalEquationSpec {
  std::vector<GammaFactor> factors;
  cplx omega{1.0, 0.0};
  double sigmaStar = 0.0;
  double poleRadius = 2.0;
  std::vector<PoleSpec> poles;
};

struct DerivedConstants {
  double A = 0.0;
  cplx B{};
  cplx Btilde{};
  double h = 0.0;
  cplx a{};   // -vartheta + i xi
  cplx k{};   // kappa + i eta
  cplx e0{};
  int d = 0;
  cplx omega{1.0, 0.0};

  double vartheta() const noexcept { return -a.real(); }
  double xi() const noexcept { return a.imag(); }
  double kappa() const noexcept { return k.real(); }
  double eta() const noexcept { return k.imag(); }
  double degree() const noexcept { return 2.0 * A; }
};

// Empty result means every machine-checkable invariant holds. Each entry
// starts with the name of the failed invariant.
std::vector<std::string> validate_spec(const FunctionalEquationSpec& spec);

// Throws ValidationError when validate_spec reports anything.
DerivedConstants derive_constants(const FunctionalEquationSpec& spec);

// varsigma = omega * e0 * b1/|b1|.
cplx sign_scalar(const DerivedConstants& consts, cplx b1);

bool is_self_dual(const FunctionalEquationSpec& spec, double tol = 1e-12);

std::string spec_to_json(const FunctionalEquationSpec& spec);
FunctionalEquationSpec spec_from_json(const std::string& text);
FunctionalEquationSpec load_spec_file(const std::string& path);

}  // namespace localmean
