#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "localmean/cli.hpp"
#include "localmean/feq.hpp"
#include "localmean/instances.hpp"
#include "localmean/providers.hpp"
#include "localmean/voronoi.hpp"

using namespace localmean;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "localmean");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp_path(const std::string& name) {
  const char* dir = std::getenv("LOCALMEAN_TEST_TMP");
  return std::string(dir ? dir : ".") + "/" + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

std::string write_stream(const std::string& name, const CoefficientStream& s) {
  const auto path = tmp_path(name);
  std::ofstream f(path);
  export_stream(s, f, StreamFormat::CSV);
  return path;
}

CoefficientStream constant_stream(std::size_t n, bool alternating) {
  CoefficientStream s;
  s.kind = StreamKind::FromFile;
  for (std::size_t i = 1; i <= n; ++i) {
    double a = 1.0;
    if (alternating && i % 2 == 0) a = -1.0;
    s.points.push_back({static_cast<double>(i), {a, 0.0}});
  }
  return s;
}

}  // namespace

TEST_CASE("constants for zeta") {
  const auto r = run({"constants", "--instance", "zeta"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("1.128379") != std::string::npos);
  CHECK(r.out.find("h") != std::string::npos);
}

TEST_CASE("constants as json") {
  const auto r = run({"constants", "--instance", "delta", "--json"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j.contains("constants"));
  REQUIRE(j.contains("expansion"));
  CHECK(r.out.find("1.5957691") != std::string::npos);
}

TEST_CASE("invalid spec file exits with a validation code") {
  auto spec = builtin_spec(Instance::Zeta);
  spec.omega = {2.0, 0.0};
  const auto path = tmp_path("bad_root_number.json");
  write_file(path, spec_to_json(spec));
  const auto r = run({"constants", "--spec", path});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("root number modulus") != std::string::npos);
}

TEST_CASE("unknown option and unknown instance") {
  CHECK(run({"constants", "--bogus"}).code == kExitValidation);
  CHECK(run({"constants", "--instance", "nope"}).code == kExitValidation);
  CHECK(run({}).code == kExitValidation);
}

TEST_CASE("voronoi on Delta round trips and repeats bit for bit") {
  const std::vector<std::string> args{"voronoi", "--instance", "delta", "--X", "1e3", "--grid", "2", "--json"};
  const auto r = run(args);
  REQUIRE(r.code == kExitOk);
  const auto rows = evaluations_from_json(r.out);
  REQUIRE(rows.size() == 2);
  for (const auto& e : rows) {
    CHECK_FALSE(e.truncationFailed);
    CHECK_FALSE(e.emptyWindow);
    CHECK(e.errorRatio > 0.5);
    CHECK(e.errorRatio < 20.0);
    CHECK(std::abs(e.seriesValue - e.sPhi) <= 1e-3 * std::abs(e.sPhi) + e.tailBound);
  }
  CHECK(evaluations_to_json(rows) == evaluations_to_json(evaluations_from_json(evaluations_to_json(rows))));
  CHECK(run(args).out == r.out);
}

TEST_CASE("voronoi flags an empty window for zeta") {
  const auto r = run({"voronoi", "--instance", "zeta", "--X", "1e4", "--grid", "1", "--json"});
  REQUIRE(r.code == kExitOk);
  const auto rows = evaluations_from_json(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].emptyWindow);
  CHECK(rows[0].directSum == cplx{});
}

TEST_CASE("signscan on zeta and on an alternating file") {
  auto r = run({"signscan", "--instance", "zeta", "--X", "1e3", "--json"});
  REQUIRE(r.code == kExitOk);
  auto j = json::parse(r.out);
  CHECK(j["report"]["nStar"] == 0);

  const auto alt = write_stream("alternating.csv", constant_stream(100, true));
  write_file(tmp_path("zeta_spec.json"), spec_to_json(builtin_spec(Instance::Zeta)));
  r = run({"signscan", "--spec", tmp_path("zeta_spec.json"), "--coeffs", alt, "--X", "100", "--json"});
  REQUIRE(r.code == kExitOk);
  j = json::parse(r.out);
  CHECK(j["report"]["nStar"] == 99);
}

TEST_CASE("signscan rejects complex coefficients") {
  auto s = constant_stream(50, false);
  s.points[2].a = {0.0, 1.0};
  const auto path = write_stream("complex.csv", s);
  write_file(tmp_path("zeta_spec2.json"), spec_to_json(builtin_spec(Instance::Zeta)));
  const auto r = run({"signscan", "--spec", tmp_path("zeta_spec2.json"), "--coeffs", path, "--X", "40"});
  CHECK(r.code == kExitData);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("malformed coefficient file exits with a data code") {
  const auto path = tmp_path("broken.csv");
  write_file(path, "lambda,re,im\n1,1,0\n2,x,0\n");
  write_file(tmp_path("zeta_spec3.json"), spec_to_json(builtin_spec(Instance::Zeta)));
  const auto r = run({"signscan", "--spec", tmp_path("zeta_spec3.json"), "--coeffs", path, "--X", "2"});
  CHECK(r.code == kExitData);
}

TEST_CASE("detect on Delta finds both signs") {
  const std::vector<std::string> args{"detect", "--instance", "delta", "--X", "1e3", "--json"};
  const auto r = run(args);
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 2);
  for (const auto& row : j["rows"]) {
    CHECK(row["success"] == true);
    CHECK(row["crossingFound"] == true);
    CHECK(row["valuePlus"].get<double>() > 0.0);
    CHECK(row["valueMinus"].get<double>() < 0.0);
  }
  CHECK_FALSE(j["kernelAverages"].empty());
  CHECK(run(args).out == r.out);
}

TEST_CASE("detect reports failure without an error on constant-sign data") {
  write_file(tmp_path("delta_spec.json"), spec_to_json(builtin_spec(Instance::Delta)));
  const auto path = write_stream("ones.csv", constant_stream(2400, false));
  const auto r = run({"detect", "--spec", tmp_path("delta_spec.json"), "--coeffs", path, "--X", "1e3", "--grid",
                      "1", "--N", "50", "--json"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["success"] == false);
}

TEST_CASE("detect rejects a non-positive delta") {
  const auto r = run({"detect", "--instance", "delta", "--X", "1e3", "--delta", "0"});
  CHECK(r.code == kExitValidation);
}
