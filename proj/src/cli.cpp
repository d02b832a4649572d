#include "localmean/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "localmean/errors.hpp"
#include "localmean/feq.hpp"
#include "localmean/gamma_ratio.hpp"
#include "localmean/instances.hpp"
#include "localmean/oscillation.hpp"
#include "localmean/providers.hpp"
#include "localmean/voronoi.hpp"
#include "localmean/weight.hpp"

namespace localmean {

namespace {

using ojson = nlohmann::ordered_json;

enum class Format { Table, CSV, JSON };

struct RunConfig {
  std::string command;
  std::string instance;
  std::string specPath;
  std::string coeffsPath;
  double X = 1e3;
  double delta = 0.1;
  double tol = 1e-2;
  double c0 = 0.0;  // <= 0: command default
  int J = 4;
  std::size_t grid = 0;  // 0: command default
  Format format = Format::Table;
  std::string outPath;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  std::size_t N = 50;
  std::size_t tgrid = 64;
  double xlow = 0.0;
  bool lambdaSpace = false;
};

struct Problem {
  FunctionalEquationSpec spec;
  DerivedConstants consts;
  CoefficientStream stream;
  std::string label;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  return format_double(v);
}

std::string fmt(cplx v) {
  if (v.imag() == 0.0) return fmt(v.real());
  return fmt(v.real()) + (std::signbit(v.imag()) ? "-" : "+") + fmt(std::abs(v.imag())) + "i";
}

ojson jnum(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }
ojson jcplx(cplx v) { return ojson::array({jnum(v.real()), jnum(v.imag())}); }

std::string format_name(Format f) {
  switch (f) {
    case Format::Table: return "table";
    case Format::CSV: return "csv";
    case Format::JSON: return "json";
  }
  return "table";
}

// Ordered key/value pairs printed ahead of every result.
using Header = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const Header& h, Format f) {
  for (const auto& [k, v] : h) out << "# " << k << (f == Format::CSV ? "=" : ": ") << v << '\n';
}

ojson header_json(const Header& h) {
  ojson j = ojson::object();
  for (const auto& [k, v] : h) j[k] = v;
  return j;
}

double first_lambda(Instance which) {
  switch (which) {
    case Instance::Zeta: return std::sqrt(std::numbers::pi);
    case Instance::ZetaSquared: return std::numbers::pi;
    case Instance::Delta: return 2.0 * std::numbers::pi;
  }
  return 1.0;
}

StreamFormat stream_format_for(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "json") return StreamFormat::JSON;
  }
  return StreamFormat::CSV;
}

// lambdaNeeded: the largest lambda the command touches; minTerms: dual terms
// wanted for series work.
Problem load_problem(const RunConfig& cfg, double lambdaNeeded, std::size_t minTerms, bool needStream) {
  Problem p;
  std::optional<Instance> inst;
  if (!cfg.specPath.empty()) {
    try {
      p.spec = load_spec_file(cfg.specPath);
    } catch (const DataError& e) {
      throw ValidationError({std::string("spec file: ") + e.what()});
    }
    p.label = cfg.specPath;
  } else {
    inst = parse_instance(cfg.instance.empty() ? "zeta2" : cfg.instance);
    p.spec = builtin_spec(*inst);
    p.label = instance_name(*inst);
  }
  p.consts = derive_constants(p.spec);
  if (!needStream) return p;

  if (!cfg.coeffsPath.empty()) {
    p.stream = ingest_stream(cfg.coeffsPath, stream_format_for(cfg.coeffsPath));
    validate_stream(p.stream);
  } else if (inst) {
    std::size_t limit = cfg.limit;
    if (limit == 0) {
      limit = static_cast<std::size_t>(std::ceil(lambdaNeeded / first_lambda(*inst))) + 16;
      limit = std::max(limit, minTerms);
      if (*inst == Instance::Delta) limit = std::min(limit, kTauLimit);
    }
    p.stream = builtin_stream(*inst, limit);
  } else {
    throw ValidationError({"--coeffs is required together with --spec for this command"});
  }
  return p;
}

std::size_t series_terms_wanted(const RunConfig& cfg) {
  if (cfg.instance == "delta") return kTauLimit;
  return 1'000'000;
}

// ---------------------------------------------------------------------------

Header base_header(const RunConfig& cfg, const Problem& p) {
  return {{"command", cfg.command},
          {"problem", p.label},
          {"format", format_name(cfg.format)},
          {"seed", std::to_string(cfg.seed)},
          {"A", fmt(p.consts.A)},
          {"h", fmt(p.consts.h)},
          {"vartheta", fmt(p.consts.vartheta())},
          {"xi", fmt(p.consts.xi())},
          {"kappa", fmt(p.consts.kappa())},
          {"eta", fmt(p.consts.eta())},
          {"e0", fmt(p.consts.e0)}};
}

int cmd_constants(const RunConfig& cfg, std::ostream& out) {
  const Problem p = load_problem(cfg, 0.0, 0, false);
  const int J = std::clamp(cfg.J, 1, kMaxExpansionTerms);
  ExpansionCoefficients coeffs;
  for (int fitJ = J;; --fitJ) {
    try {
      coeffs = expansion_coeffs(p.spec, p.consts, fitJ);
      break;
    } catch (const NumericError&) {
      if (fitJ == 1) throw;
    }
  }
  const auto& c = p.consts;
  const std::vector<std::pair<std::string, cplx>> rows = {
      {"A", c.A},       {"B", c.B},         {"Btilde", c.Btilde}, {"h", c.h},
      {"a", c.a},       {"vartheta", c.vartheta()}, {"xi", c.xi()}, {"k", c.k},
      {"kappa", c.kappa()}, {"eta", c.eta()}, {"e0", c.e0},       {"d", static_cast<double>(c.d)},
      {"omega", c.omega}, {"fitSigma", coeffs.sigma0}};

  Header h = {{"command", "constants"}, {"problem", p.label}, {"J", std::to_string(coeffs.J)}};
  if (cfg.format == Format::JSON) {
    ojson j;
    j["header"] = header_json(h);
    ojson cj = ojson::object();
    for (const auto& [k, v] : rows) cj[k] = jcplx(v);
    j["constants"] = cj;
    ojson ej = ojson::array();
    for (std::size_t i = 0; i < coeffs.e.size(); ++i) {
      ojson e = {{"j", i}, {"value", jcplx(coeffs.e[i])}};
      if (i > 0) {
        const auto& d = coeffs.fitDiagnostics[i - 1];
        e["spread"] = jnum(d.spread);
        e["residualSlope"] = jnum(d.residualSlope);
      }
      ej.push_back(e);
    }
    j["expansion"] = ej;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  write_header(out, h, cfg.format);
  if (cfg.format == Format::CSV) {
    out << "name,re,im\n";
    for (const auto& [k, v] : rows) out << k << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
    for (std::size_t i = 0; i < coeffs.e.size(); ++i) {
      out << 'e' << i << ',' << fmt(coeffs.e[i].real()) << ',' << fmt(coeffs.e[i].imag()) << '\n';
    }
    return kExitOk;
  }
  for (const auto& [k, v] : rows) out << std::left << std::setw(10) << k << fmt(v) << '\n';
  out << '\n' << std::left << std::setw(3) << "j" << std::setw(48) << "e_j" << std::setw(25) << "fit spread"
      << "residual slope\n";
  for (std::size_t i = 0; i < coeffs.e.size(); ++i) {
    out << std::left << std::setw(3) << i << std::setw(48) << fmt(coeffs.e[i]);
    if (i > 0) {
      const auto& d = coeffs.fitDiagnostics[i - 1];
      out << std::setw(25) << fmt(d.spread) << fmt(d.residualSlope);
    }
    out << '\n';
  }
  return kExitOk;
}

std::vector<double> voronoi_grid(const RunConfig& cfg) {
  const std::size_t count = cfg.grid == 0 ? 17 : cfg.grid;
  const double lo = cfg.X, hi = 4.0 * cfg.X;
  if (cfg.seed == 0) return log_grid(lo, hi, count);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(std::log(lo), std::log(hi));
  std::vector<double> xs(count);
  for (auto& x : xs) x = std::exp(dist(rng));
  std::sort(xs.begin(), xs.end());
  return xs;
}

int cmd_voronoi(const RunConfig& cfg, std::ostream& out) {
  const auto xs = voronoi_grid(cfg);
  const double lambdaNeeded = xs.back() * 1.5;
  const Problem p = load_problem(cfg, lambdaNeeded, cfg.specPath.empty() ? series_terms_wanted(cfg) : 0, true);
  const VoronoiEngine engine(p.spec, p.stream, cfg.J);
  const auto& c = engine.constants();
  const WeightProfile profile = WeightProfile::make(cfg.delta, cfg.X, c.A);

  std::vector<VoronoiEvaluation> rows;
  for (double x : xs) {
    TruncationPolicy policy;
    policy.tolerance = cfg.tol * std::pow(x, 1.0 - c.vartheta() - 1.0 / (2.0 * c.A)) / profile.L;
    rows.push_back(engine.evaluate(profile, x, policy));
  }

  Header h = base_header(cfg, p);
  h.insert(h.end(), {{"X", fmt(cfg.X)},
                     {"delta", fmt(cfg.delta)},
                     {"L", fmt(profile.L)},
                     {"J", std::to_string(engine.series_terms())},
                     {"tolerance", fmt(cfg.tol) + " * x^(1-vartheta-1/(2A))/L"},
                     {"streamTerms", std::to_string(p.stream.size())}});
  if (cfg.format == Format::JSON) {
    ojson j;
    j["header"] = header_json(h);
    j["rows"] = ojson::parse(evaluations_to_json(rows));
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  write_header(out, h, cfg.format);
  if (cfg.format == Format::CSV) {
    write_evaluations_csv(rows, out);
    return kExitOk;
  }
  out << std::left << std::setw(25) << "x" << std::setw(25) << "sPhi" << std::setw(25) << "leading"
      << std::setw(25) << "series" << std::setw(25) << "tailBound" << std::setw(10) << "terms" << std::setw(25)
      << "errorRatio"
      << "flags\n";
  for (const auto& r : rows) {
    std::string flags;
    if (r.emptyWindow) flags += "emptyWindow ";
    if (r.truncationFailed) flags += "truncationFailed";
    out << std::left << std::setw(25) << fmt(r.x) << std::setw(25) << fmt(r.sPhi.real()) << std::setw(25)
        << fmt(r.leadingTerm.real()) << std::setw(25) << fmt(r.seriesValue.real()) << std::setw(25)
        << fmt(r.tailBound) << std::setw(10) << r.termCount << std::setw(25) << fmt(r.errorRatio) << flags << '\n';
  }
  return kExitOk;
}

int cmd_signscan(const RunConfig& cfg, std::ostream& out) {
  const double xMax = cfg.X;
  const double xLow = cfg.xlow > 0.0 ? cfg.xlow : std::max(1.0, xMax / 100.0);
  if (!(xLow <= xMax)) throw DomainError("signscan: --xlow must not exceed --X");
  RunConfig sized = cfg;
  Problem p;
  if (cfg.lambdaSpace) {
    p = load_problem(sized, 1.2 * xMax, 0, true);
  } else {
    // index space: n <= 1.2 X, converted to lambda for the loader
    if (cfg.limit == 0 && cfg.coeffsPath.empty()) {
      sized.limit = static_cast<std::size_t>(std::ceil(1.2 * xMax)) + 16;
    }
    p = load_problem(sized, 0.0, 0, true);
    p.stream = reindexed(p.stream);
  }
  const double exponent = 1.0 - 1.0 / (2.0 * p.consts.A);
  const auto centers = log_grid(xLow, xMax, cfg.grid == 0 ? 200 : cfg.grid);
  const SignChangeReport totals = sign_changes(p.stream, xMax);
  const double c0min = minimal_c0(p.stream, centers, exponent);
  const double c0 = cfg.c0 > 0.0 ? cfg.c0 : (std::isfinite(c0min) && c0min > 0.0 ? c0min : 1.0);
  SignChangeReport report = window_scan_at(p.stream, centers, c0, exponent);
  report.nStar = totals.nStar;
  report.nPlus = totals.nPlus;
  report.nMinus = totals.nMinus;

  std::vector<std::pair<double, double>> checkpoints;
  for (double x = 10.0; x < xMax; x *= 10.0) {
    checkpoints.emplace_back(x, static_cast<double>(sign_changes(p.stream, x).nStar) / std::pow(x, 1.0 / (2.0 * p.consts.A)));
  }
  checkpoints.emplace_back(xMax, static_cast<double>(totals.nStar) / std::pow(xMax, 1.0 / (2.0 * p.consts.A)));
  std::size_t found = 0;
  for (const auto& w : report.windows) found += w.found ? 1 : 0;

  Header h = base_header(cfg, p);
  h.insert(h.end(), {{"space", cfg.lambdaSpace ? "lambda" : "index"},
                     {"xLow", fmt(xLow)},
                     {"xMax", fmt(xMax)},
                     {"exponent", fmt(exponent)},
                     {"c0", fmt(c0)},
                     {"minimalC0", fmt(c0min)},
                     {"nPlus", std::to_string(report.nPlus)},
                     {"nMinus", std::to_string(report.nMinus)},
                     {"nStar", std::to_string(report.nStar)},
                     {"windowsWithChange", std::to_string(found) + "/" + std::to_string(report.windows.size())}});
  if (cfg.format == Format::JSON) {
    ojson j;
    j["header"] = header_json(h);
    j["report"] = ojson::parse(report_to_json(report));
    ojson cp = ojson::array();
    for (const auto& [x, r] : checkpoints) cp.push_back({{"x", x}, {"nStarNormalized", r}});
    j["checkpoints"] = cp;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  write_header(out, h, cfg.format);
  if (cfg.format == Format::CSV) {
    write_report_csv(report, out);
    out << "\ncheckpoint,nStarNormalized\n";
    for (const auto& [x, r] : checkpoints) out << fmt(x) << ',' << fmt(r) << '\n';
    return kExitOk;
  }
  out << std::left << std::setw(25) << "checkpoint x" << "N*(x)/x^(1/2A)\n";
  for (const auto& [x, r] : checkpoints) out << std::left << std::setw(25) << fmt(x) << fmt(r) << '\n';
  out << '\n' << std::left << std::setw(25) << "center" << std::setw(8) << "found" << std::setw(25) << "xPlus"
      << "xMinus\n";
  for (const auto& w : report.windows) {
    out << std::left << std::setw(25) << fmt(w.center) << std::setw(8) << (w.found ? "yes" : "no") << std::setw(25)
        << fmt(w.xPlus) << fmt(w.xMinus) << '\n';
  }
  return kExitOk;
}

int cmd_detect(const RunConfig& cfg, std::ostream& out) {
  const std::size_t count = cfg.grid == 0 ? 2 : cfg.grid;
  std::vector<double> xs;
  for (std::size_t i = 0; i < count; ++i) xs.push_back(cfg.X * std::pow(10.0, static_cast<double>(i)));
  DetectionParams d;
  d.delta = cfg.delta;
  d.c0 = cfg.c0 > 0.0 ? cfg.c0 : 2.0;
  d.N = cfg.N;
  d.TGridCount = cfg.tgrid;
  validate_detection(d);
  const Problem p = load_problem(cfg, 2.0 * xs.back() + 100.0, d.N, true);
  const auto& c = p.consts;

  struct KRow {
    double x;
    KernelAverage k;
  };
  std::vector<DetectionResult> rows;
  std::vector<KRow> krows;
  std::vector<ResolvedDetection> resolved;
  for (double x : xs) {
    const WeightProfile profile = WeightProfile::make(d.delta, x, c.A);
    const ResolvedDetection rd = resolve_detection(c, p.stream, profile, d);
    resolved.push_back(rd);
    try {
      rows.push_back(detect_extrema(p.spec, c, p.stream, x, d));
    } catch (const ThresholdError& e) {
      DetectionResult r;
      r.x = x;
      r.note = std::string("skipped: ") + e.what();
      rows.push_back(r);
      continue;
    }
    const KernelParams kp{1.0, rd.rho, rd.theta, rd.alpha};
    for (double T : t_grid(c, p.stream, x, d.TGridCount)) {
      if (!(T > 2.0 * rd.alpha)) continue;
      krows.push_back({x, kernel_average(p.spec, c, p.stream, profile, T, kp, d)});
    }
  }

  Header h = base_header(cfg, p);
  h.insert(h.end(), {{"delta", fmt(d.delta)},
                     {"c0", fmt(d.c0)},
                     {"N", std::to_string(d.N)},
                     {"TGridCount", std::to_string(d.TGridCount)},
                     {"tau", "1"}});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::string tag = "[x=" + fmt(xs[i]) + "]";
    h.emplace_back("alpha" + tag, fmt(resolved[i].alpha));
    h.emplace_back("X0" + tag, fmt(resolved[i].X0));
    h.emplace_back("rho" + tag, fmt(resolved[i].rho));
  }

  if (cfg.format == Format::JSON) {
    ojson j;
    j["header"] = header_json(h);
    ojson rj = ojson::array();
    for (const auto& r : rows) {
      rj.push_back({{"x", r.x},
                    {"L", jnum(r.L)},
                    {"windowLow", jnum(r.windowLow)},
                    {"windowHigh", jnum(r.windowHigh)},
                    {"xPlus", jnum(r.xPlus)},
                    {"xMinus", jnum(r.xMinus)},
                    {"valuePlus", jnum(r.valuePlus)},
                    {"valueMinus", jnum(r.valueMinus)},
                    {"scale", jnum(r.scale)},
                    {"normalizedPlus", jnum(r.scale > 0 ? r.valuePlus / r.scale : 0.0)},
                    {"normalizedMinus", jnum(r.scale > 0 ? r.valueMinus / r.scale : 0.0)},
                    {"success", r.success},
                    {"crossingFound", r.crossingFound},
                    {"crossing", jnum(r.crossing)},
                    {"gridPoints", r.gridPoints},
                    {"note", r.note}});
    }
    j["rows"] = rj;
    ojson kj = ojson::array();
    for (const auto& k : krows) {
      kj.push_back({{"x", k.x},
                    {"T", k.k.T},
                    {"numeric", jcplx(k.k.numeric)},
                    {"analytic", jcplx(k.k.analytic)},
                    {"remainderBound", jnum(k.k.remainderBound)},
                    {"nodes", k.k.nodes}});
    }
    j["kernelAverages"] = kj;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  write_header(out, h, cfg.format);
  if (cfg.format == Format::CSV) {
    out << "x,L,windowLow,windowHigh,xPlus,valuePlus,xMinus,valueMinus,scale,success,crossingFound,crossing,note\n";
    for (const auto& r : rows) {
      out << fmt(r.x) << ',' << fmt(r.L) << ',' << fmt(r.windowLow) << ',' << fmt(r.windowHigh) << ','
          << fmt(r.xPlus) << ',' << fmt(r.valuePlus) << ',' << fmt(r.xMinus) << ',' << fmt(r.valueMinus) << ','
          << fmt(r.scale) << ',' << (r.success ? 1 : 0) << ',' << (r.crossingFound ? 1 : 0) << ','
          << fmt(r.crossing) << ',' << '"' << r.note << '"' << '\n';
    }
    out << "\nx,T,numericRe,numericIm,analyticRe,analyticIm,remainderBound\n";
    for (const auto& k : krows) {
      out << fmt(k.x) << ',' << fmt(k.k.T) << ',' << fmt(k.k.numeric.real()) << ',' << fmt(k.k.numeric.imag())
          << ',' << fmt(k.k.analytic.real()) << ',' << fmt(k.k.analytic.imag()) << ',' << fmt(k.k.remainderBound)
          << '\n';
    }
    return kExitOk;
  }
  out << std::left << std::setw(25) << "x" << std::setw(25) << "xPlus" << std::setw(25) << "value+/scale"
      << std::setw(25) << "xMinus" << std::setw(25) << "value-/scale" << std::setw(25) << "crossing"
      << "status\n";
  for (const auto& r : rows) {
    const std::string status = !r.note.empty() ? r.note : (r.success ? "ok" : "failed");
    out << std::left << std::setw(25) << fmt(r.x) << std::setw(25) << fmt(r.xPlus) << std::setw(25)
        << fmt(r.scale > 0 ? r.valuePlus / r.scale : 0.0) << std::setw(25) << fmt(r.xMinus) << std::setw(25)
        << fmt(r.scale > 0 ? r.valueMinus / r.scale : 0.0) << std::setw(25)
        << (r.crossingFound ? fmt(r.crossing) : "-") << status << '\n';
  }
  if (!krows.empty()) {
    out << '\n' << std::left << std::setw(25) << "x" << std::setw(25) << "T" << std::setw(25) << "numeric*L"
        << std::setw(25) << "analytic*L" << "remainder*L\n";
    for (const auto& k : krows) {
      const double L = WeightProfile::make(d.delta, k.x, c.A).L;
      out << std::left << std::setw(25) << fmt(k.x) << std::setw(25) << fmt(k.k.T) << std::setw(25)
          << fmt(k.k.numeric.real() * L) << std::setw(25) << fmt(k.k.analytic.real() * L)
          << fmt(k.k.remainderBound * L) << '\n';
    }
  }
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "constants") return cmd_constants(cfg, out);
  if (cfg.command == "voronoi") return cmd_voronoi(cfg, out);
  if (cfg.command == "signscan") return cmd_signscan(cfg, out);
  if (cfg.command == "detect") return cmd_detect(cfg, out);
  throw DomainError("unknown command " + cfg.command);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local weighted means of L-function coefficients: Voronoi series, detection and sign scans"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "table";
  bool asJson = false, asCsv = false;

  app.add_option("--instance", cfg.instance, "Builtin instance")->check(CLI::IsMember({"zeta", "zeta2", "delta"}));
  app.add_option("--spec", cfg.specPath, "Functional-equation spec (JSON)");
  app.add_option("--coeffs", cfg.coeffsPath, "Coefficient file (.csv or .json)");
  app.add_option("--X", cfg.X, "Scale X (signscan: upper end of the scan)")->check(CLI::PositiveNumber);
  app.add_option("--delta", cfg.delta, "Window parameter delta")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "Series tail tolerance relative to x^(1-vartheta-1/(2A))/L")->check(CLI::PositiveNumber);
  app.add_option("--c0", cfg.c0, "Window constant c0")->check(CLI::PositiveNumber);
  app.add_option("--J", cfg.J, "Expansion terms")->check(CLI::Range(1, kMaxExpansionTerms));
  app.add_option("--grid", cfg.grid, "Grid size (voronoi x points, signscan centers, detect decades)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_flag("--json", asJson, "Same as --format json");
  app.add_flag("--csv", asCsv, "Same as --format csv");
  app.add_option("--out", cfg.outPath, "Write output to this file");
  app.add_option("--seed", cfg.seed, "Seed for randomized x sampling (0: log grid)");
  app.add_option("--limit", cfg.limit, "Number of builtin coefficients to materialize");
  app.add_option("--N", cfg.N, "Head length of S_phi0 in detection")->check(CLI::PositiveNumber);
  app.add_option("--tgrid", cfg.tgrid, "Kernel-average T points per checkpoint");
  app.add_option("--xlow", cfg.xlow, "Lower end of the signscan window centers")->check(CLI::PositiveNumber);
  app.add_flag("--lambda", cfg.lambdaSpace, "signscan over lambda instead of the index n");
  app.get_option("--spec")->excludes("--instance");

  for (const char* name : {"constants", "voronoi", "signscan", "detect"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("constants")->description("Derived constants and fitted expansion coefficients");
  app.get_subcommand("voronoi")->description("Direct sums, residues and Voronoi series over an x grid");
  app.get_subcommand("signscan")->description("Sign-change counts and short-window scans");
  app.get_subcommand("detect")->description("Two-sided extrema of the normalized local mean");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (asJson) format = "json";
  if (asCsv) format = "csv";
  cfg.format = format == "json" ? Format::JSON : format == "csv" ? Format::CSV : Format::Table;

  try {
    if (cfg.outPath.empty()) return dispatch(cfg, out);
    std::ostringstream buf;
    const int code = dispatch(cfg, buf);
    std::ofstream file(cfg.outPath, std::ios::binary);
    if (!file) throw DataError("cannot write " + cfg.outPath);
    file << buf.str();
    return code;
  } catch (const ValidationError& e) {
    err << "error: invalid functional-equation spec\n";
    for (const auto& v : e.violations()) err << "  - " << v << '\n';
    return kExitValidation;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SingularityError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace localmean
