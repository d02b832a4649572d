#pragma once

#include <functional>
#include <string>

#include "localmean/feq.hpp"
#include "localmean/providers.hpp"

namespace localmean {

enum class Instance { Zeta, ZetaSquared, Delta };

inline constexpr double kEulerGamma = 0.5772156649015329;

FunctionalEquationSpec builtin_spec(Instance which);

// Analytic continuation of phi(s) = sum a_n lambda_n^{-s}; empty for Delta.
std::function<cplx(cplx)> builtin_phi(Instance which);

CoefficientStream builtin_stream(Instance which, std::size_t limit);

Instance parse_instance(const std::string& name);
std::string instance_name(Instance which);

}  // namespace localmean
