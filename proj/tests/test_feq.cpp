#include <cmath>
#include <numbers>

#include "doctest.h"
#include "localmean/errors.hpp"
#include "localmean/feq.hpp"
#include "localmean/instances.hpp"

using namespace localmean;

namespace {

bool has_violation(const std::vector<std::string>& report, const std::string& needle) {
  for (const auto& v : report)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

void check_close(cplx got, cplx want, double tol) {
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_CASE("zeta constants") {
  const auto c = derive_constants(builtin_spec(Instance::Zeta));
  CHECK(c.A == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.h == doctest::Approx(2.0).epsilon(1e-14));
  check_close(c.a, 0.0, 1e-14);
  check_close(c.k, 0.0, 1e-14);
  check_close(c.e0, 2.0 / std::sqrt(std::numbers::pi), 1e-14);
  CHECK(c.d == 1);
}

TEST_CASE("zeta squared constants") {
  const auto c = derive_constants(builtin_spec(Instance::ZetaSquared));
  CHECK(c.A == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.h == doctest::Approx(16.0).epsilon(1e-14));
  check_close(c.a, -0.25, 1e-14);
  check_close(c.k, 0.25, 1e-14);
  check_close(c.e0, 4.0 * std::sqrt(2.0 / std::numbers::pi), 1e-14);
  CHECK(c.d == 2);
}

TEST_CASE("delta constants") {
  const auto c = derive_constants(builtin_spec(Instance::Delta));
  CHECK(c.A == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.h == doctest::Approx(4.0).epsilon(1e-14));
  check_close(c.a, -0.25, 1e-14);
  check_close(c.k, -23.0 / 4.0, 1e-14);
  check_close(c.e0, 2.0 * std::sqrt(2.0 / std::numbers::pi), 1e-14);
}

TEST_CASE("self-dual instances have real constants") {
  for (auto which : {Instance::Zeta, Instance::ZetaSquared, Instance::Delta}) {
    const auto spec = builtin_spec(which);
    const auto c = derive_constants(spec);
    CHECK(is_self_dual(spec));
    CHECK(c.xi() == 0.0);
    CHECK(c.eta() == 0.0);
  }
}

TEST_CASE("scaling all alphas follows the closed forms") {
  // alpha = (c/2, c/2) with zero shifts: A = c, h = 4^{2c}, e0 = sqrt(2/pi) 4^c.
  for (double c : {0.5, 0.75, 1.0, 1.5, 3.0}) {
    FunctionalEquationSpec s = builtin_spec(Instance::ZetaSquared);
    for (auto& f : s.factors) f.alpha = c / 2;
    s.poles.clear();
    const auto k = derive_constants(s);
    const double A = c;
    CHECK(k.A == doctest::Approx(A).epsilon(1e-12));
    CHECK(k.h == doctest::Approx(std::pow(4.0, 2 * c)).epsilon(1e-12));
    check_close(k.e0, std::sqrt(2.0 / std::numbers::pi) * std::pow(4.0, c), 1e-12);
    check_close(k.a, 1.0 / (4.0 * A) - 0.5, 1e-12);
    check_close(k.k, 0.75 - A / 2.0, 1e-12);
  }
}

TEST_CASE("derive_constants is deterministic") {
  const auto s = builtin_spec(Instance::Delta);
  const auto a = derive_constants(s);
  const auto b = derive_constants(s);
  CHECK(a.h == b.h);
  CHECK(a.e0 == b.e0);
  CHECK(a.a == b.a);
  CHECK(a.k == b.k);
}

TEST_CASE("validation") {
  CHECK(validate_spec(builtin_spec(Instance::Zeta)).empty());

  auto s = builtin_spec(Instance::Zeta);
  s.omega = 2.0;
  CHECK(has_violation(validate_spec(s), "root number modulus"));

  s = builtin_spec(Instance::Zeta);
  s.poles[0].location = s.poleRadius + 1.0;
  CHECK(has_violation(validate_spec(s), "pole outside disk"));

  s = builtin_spec(Instance::Zeta);
  s.factors.clear();
  CHECK(has_violation(validate_spec(s), "empty factor list"));
  CHECK_THROWS_AS(derive_constants(s), ValidationError);

  s = builtin_spec(Instance::Zeta);
  s.factors[0].alpha = -1.0;
  CHECK(has_violation(validate_spec(s), "non-positive alpha"));
  CHECK_THROWS_AS(derive_constants(s), ValidationError);
}

TEST_CASE("sign scalar") {
  const auto c = derive_constants(builtin_spec(Instance::Zeta));
  const double e0 = 2.0 / std::sqrt(std::numbers::pi);
  check_close(sign_scalar(c, 1.0), e0, 1e-14);
  check_close(sign_scalar(c, -1.0), -e0, 1e-14);
  check_close(sign_scalar(c, 3.7), c.e0, 1e-14);
  CHECK(std::abs(sign_scalar(c, cplx(0.3, -2.0))) == doctest::Approx(std::abs(c.e0)));
  CHECK_THROWS_AS(sign_scalar(c, 0.0), DomainError);
}

TEST_CASE("spec JSON round trip") {
  for (auto which : {Instance::Zeta, Instance::ZetaSquared, Instance::Delta}) {
    const auto s = builtin_spec(which);
    const auto back = spec_from_json(spec_to_json(s));
    REQUIRE(back.factors.size() == s.factors.size());
    for (std::size_t i = 0; i < s.factors.size(); ++i) {
      CHECK(back.factors[i].alpha == s.factors[i].alpha);
      CHECK(back.factors[i].beta == s.factors[i].beta);
      CHECK(back.factors[i].betaTilde == s.factors[i].betaTilde);
    }
    CHECK(back.omega == s.omega);
    CHECK(back.sigmaStar == s.sigmaStar);
    REQUIRE(back.poles.size() == s.poles.size());
    for (std::size_t i = 0; i < s.poles.size(); ++i) CHECK(back.poles[i].principalPart == s.poles[i].principalPart);
  }
  CHECK_THROWS_AS(spec_from_json("[1, 2]"), DataError);
}
