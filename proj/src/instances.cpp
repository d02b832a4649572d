#include "localmean/instances.hpp"

#include <cmath>
#include <numbers>

#include "localmean/errors.hpp"
#include "localmean/special.hpp"

namespace localmean {

FunctionalEquationSpec builtin_spec(Instance which) {
  constexpr double pi = std::numbers::pi;
  FunctionalEquationSpec s;
  s.omega = 1.0;
  s.poleRadius = 2.0;
  switch (which) {
    case Instance::Zeta:
      s.factors = {{0.5, 0.0, 0.0}};
      s.sigmaStar = 1.1;
      s.poles = {{1.0, 1, {1.0 / std::sqrt(pi)}}};
      break;
    case Instance::ZetaSquared:
      s.factors = {{0.5, 0.0, 0.0}, {0.5, 0.0, 0.0}};
      s.sigmaStar = 1.1;
      s.poles = {{1.0, 2, {1.0 / pi, (2.0 * kEulerGamma - std::log(pi)) / pi}}};
      break;
    case Instance::Delta:
      s.factors = {{1.0, 5.5, 5.5}};
      s.sigmaStar = 1.6;
      break;
  }
  return s;
}

std::function<cplx(cplx)> builtin_phi(Instance which) {
  constexpr double pi = std::numbers::pi;
  switch (which) {
    case Instance::Zeta:
      return [](cplx s) { return std::exp(-0.5 * s * std::log(pi)) * zeta_euler_maclaurin(s); };
    case Instance::ZetaSquared:
      return [](cplx s) {
        const cplx z = zeta_euler_maclaurin(s);
        return std::exp(-s * std::log(pi)) * z * z;
      };
    case Instance::Delta:
      return {};
  }
  return {};
}

CoefficientStream builtin_stream(Instance which, std::size_t limit) {
  switch (which) {
    case Instance::Zeta: return zeta_stream(limit);
    case Instance::ZetaSquared: return zeta_squared_stream(limit);
    case Instance::Delta: return delta_stream(limit);
  }
  throw DomainError("unknown instance");
}

Instance parse_instance(const std::string& name) {
  if (name == "zeta") return Instance::Zeta;
  if (name == "zeta2") return Instance::ZetaSquared;
  if (name == "delta") return Instance::Delta;
  throw DomainError("unknown instance '" + name + "' (expected zeta, zeta2 or delta)");
}

std::string instance_name(Instance which) {
  switch (which) {
    case Instance::Zeta: return "zeta";
    case Instance::ZetaSquared: return "zeta2";
    case Instance::Delta: return "delta";
  }
  return "?";
}

}  // namespace localmean
