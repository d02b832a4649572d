#include "localmean/feq.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "localmean/errors.hpp"

namespace localmean {

namespace {

constexpr double kOmegaTol = 1e-12;

bool same_multiset(std::vector<cplx> x, std::vector<cplx> y, double tol) {
  auto less = [](cplx p, cplx q) {
    return p.real() < q.real() || (p.real() == q.real() && p.imag() < q.imag());
  };
  std::sort(x.begin(), x.end(), less);
  std::sort(y.begin(), y.end(), less);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - y[i]) > tol) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_spec(const FunctionalEquationSpec& spec) {
  std::vector<std::string> out;
  if (spec.factors.empty()) out.emplace_back("empty factor list: at least one gamma factor required");
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    const double alpha = spec.factors[i].alpha;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      out.push_back("non-positive alpha: factor " + std::to_string(i) + " has alpha " +
                    std::to_string(alpha));
    }
  }
  if (std::abs(std::abs(spec.omega) - 1.0) > kOmegaTol) {
    out.push_back("root number modulus: |omega| = " + std::to_string(std::abs(spec.omega)) +
                  ", expected 1");
  }
  if (!(spec.sigmaStar > 0.0)) {
    out.push_back("sigmaStar must be positive, got " + std::to_string(spec.sigmaStar));
  }
  if (!(spec.poleRadius > 0.0)) {
    out.push_back("poleRadius must be positive, got " + std::to_string(spec.poleRadius));
  }
  for (std::size_t i = 0; i < spec.poles.size(); ++i) {
    const auto& p = spec.poles[i];
    if (!(std::abs(p.location) < spec.poleRadius)) {
      out.push_back("pole outside disk: pole " + std::to_string(i) + " has |location| = " +
                    std::to_string(std::abs(p.location)) + " >= R = " +
                    std::to_string(spec.poleRadius));
    }
    if (p.order < 1) {
      out.push_back("pole order: pole " + std::to_string(i) + " has non-positive order");
    } else if (static_cast<int>(p.principalPart.size()) != p.order) {
      out.push_back("principal part length: pole " + std::to_string(i) + " has order " +
                    std::to_string(p.order) + " but " + std::to_string(p.principalPart.size()) +
                    " coefficients");
    } else if (p.principalPart.front() == cplx{}) {
      out.push_back("principal part leading coefficient: pole " + std::to_string(i) +
                    " has zero leading coefficient");
    }
  }
  return out;
}

bool is_self_dual(const FunctionalEquationSpec& spec, double tol) {
  std::vector<cplx> b, bt;
  for (const auto& f : spec.factors) {
    b.push_back(f.beta);
    bt.push_back(f.betaTilde);
  }
  return same_multiset(b, bt, tol);
}

DerivedConstants derive_constants(const FunctionalEquationSpec& spec) {
  if (auto v = validate_spec(spec); !v.empty()) throw ValidationError(std::move(v));

  DerivedConstants c;
  c.d = static_cast<int>(spec.factors.size());
  c.omega = spec.omega;
  for (const auto& f : spec.factors) {
    c.A += f.alpha;
    c.B += f.beta;
    c.Btilde += f.betaTilde;
  }
  const double twoA = 2.0 * c.A;
  // long double products keep h exact for the rational cases (h = 16, not 15.999...)
  long double h = 1.0L;
  std::complex<long double> logE0 = 0.5L * std::log(2.0L / std::numbers::pi_v<long double>);
  for (const auto& f : spec.factors) {
    const long double ratio = static_cast<long double>(twoA) / static_cast<long double>(f.alpha);
    h *= std::pow(ratio, 2.0L * static_cast<long double>(f.alpha));
    const cplx ex = f.alpha + f.beta - f.betaTilde;
    logE0 += std::complex<long double>(ex.real(), ex.imag()) * std::log(ratio);
  }
  c.h = static_cast<double>(h);
  const auto e0 = std::exp(logE0);
  c.e0 = {static_cast<double>(e0.real()), static_cast<double>(e0.imag())};
  c.a = 1.0 / (4.0 * c.A) - 0.5 - (c.B - c.Btilde) / twoA;
  c.k = 0.5 * c.d - 0.25 - (c.A + c.B + c.Btilde) / 2.0;
  return c;
}

cplx sign_scalar(const DerivedConstants& consts, cplx b1) {
  if (b1 == cplx{}) throw DomainError("sign_scalar: b1 must be nonzero");
  return consts.omega * consts.e0 * (b1 / std::abs(b1));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json to_json_obj(const FunctionalEquationSpec& spec) {
  json j;
  j["factors"] = json::array();
  for (const auto& f : spec.factors) {
    j["factors"].push_back({{"alpha", f.alpha},
                            {"betaRe", f.beta.real()},
                            {"betaIm", f.beta.imag()},
                            {"betaTildeRe", f.betaTilde.real()},
                            {"betaTildeIm", f.betaTilde.imag()}});
  }
  j["omegaRe"] = spec.omega.real();
  j["omegaIm"] = spec.omega.imag();
  j["sigmaStar"] = spec.sigmaStar;
  j["poleRadius"] = spec.poleRadius;
  j["poles"] = json::array();
  for (const auto& p : spec.poles) {
    json pp = {{"locRe", p.location.real()}, {"locIm", p.location.imag()}, {"order", p.order}};
    pp["principalPart"] = json::array();
    for (const auto& c : p.principalPart) pp["principalPart"].push_back({c.real(), c.imag()});
    j["poles"].push_back(pp);
  }
  return j;
}

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw DataError(std::string("spec field '") + key + "' is not a number");
  return j.at(key).get<double>();
}

}  // namespace

std::string spec_to_json(const FunctionalEquationSpec& spec) { return to_json_obj(spec).dump(2); }

FunctionalEquationSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 1);
  }
  if (!j.is_object()) throw DataError("spec JSON must be an object");
  FunctionalEquationSpec spec;
  try {
    for (const auto& f : j.value("factors", json::array())) {
      spec.factors.push_back({num(f, "alpha", 0.0), {num(f, "betaRe", 0.0), num(f, "betaIm", 0.0)},
                              {num(f, "betaTildeRe", 0.0), num(f, "betaTildeIm", 0.0)}});
    }
    spec.omega = {num(j, "omegaRe", 1.0), num(j, "omegaIm", 0.0)};
    spec.sigmaStar = num(j, "sigmaStar", 0.0);
    spec.poleRadius = num(j, "poleRadius", 2.0);
    for (const auto& p : j.value("poles", json::array())) {
      PoleSpec pole;
      pole.location = {num(p, "locRe", 0.0), num(p, "locIm", 0.0)};
      pole.order = p.value("order", 1);
      for (const auto& c : p.value("principalPart", json::array())) {
        pole.principalPart.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      }
      spec.poles.push_back(std::move(pole));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed spec JSON: ") + e.what());
  }
  return spec;
}

FunctionalEquationSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

}  // namespace localmean
