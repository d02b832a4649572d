#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace localmean {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

// Rules are built once per n and cached for the life of the process;
// the returned reference stays valid. Safe to call from several threads.
const GaussLegendreRule& gauss_legendre(std::size_t n);

// Integral of f over [a, b] with an n-point rule.
template <class F>
auto integrate_gl(F&& f, double a, double b, std::size_t n) {
  const auto& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  decltype(f(mid)) sum{};
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

}  // namespace localmean
