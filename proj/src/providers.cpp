#include "localmean/providers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "localmean/errors.hpp"

namespace localmean {

void validate_stream(const CoefficientStream& stream) {
  auto check = [](const std::vector<CoefficientPoint>& pts, const char* name) {
    if (pts.empty()) throw DataError(std::string(name) + " sequence is empty");
    if (pts.front().a == cplx{}) throw DataError(std::string(name) + " first coefficient must be nonzero");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(pts[i].lambda > 0.0)) throw DataError(std::string(name) + " frequencies must be positive");
      if (i > 0 && !(pts[i].lambda > pts[i - 1].lambda)) {
        throw DataError(std::string(name) + " frequencies not strictly increasing at index " +
                        std::to_string(i + 1));
      }
    }
  };
  check(stream.points, "primal");
  if (!stream.selfDual) check(stream.dualPoints, "dual");
}

std::vector<std::uint32_t> divisor_counts(std::size_t limit) {
  std::vector<std::uint32_t> d(limit + 1, 0);
  for (std::size_t k = 1; k <= limit; ++k)
    for (std::size_t m = k; m <= limit; m += k) ++d[m];
  return d;
}

std::vector<double> divisor_counts_m(std::size_t limit, int m) {
  // d_m is multiplicative with d_m(p^e) = binom(e + m - 1, m - 1).
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (std::size_t p = 2; p <= limit; ++p) {
    if (spf[p] != 0) continue;
    for (std::size_t q = p; q <= limit; q += p)
      if (spf[q] == 0) spf[q] = static_cast<std::uint32_t>(p);
  }
  std::vector<double> out(limit + 1, 0.0);
  if (limit >= 1) out[1] = 1.0;
  for (std::size_t n = 2; n <= limit; ++n) {
    const std::size_t p = spf[n];
    std::size_t rest = n;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    double binom = 1.0;
    for (int i = 1; i <= e; ++i) binom = binom * (m - 1 + i) / i;
    out[n] = out[rest] * binom;
  }
  return out;
}

namespace {

// Coefficients of g = f^8 modulo a prime, where f = prod (1 - q^k)^3 is
// sparse. Uses n g_n = sum_{j>=1} (9 j - n) f_j g_{n-j}; the unreduced
// sum stays below 2^108, so one reduction per n suffices.
std::vector<std::uint64_t> jacobi_cube_power8_mod(std::size_t len, std::uint64_t p,
                                                  const std::vector<std::pair<std::size_t, std::int64_t>>& cube) {
  std::vector<std::uint64_t> inv(len + 1, 1);
  for (std::size_t i = 2; i <= len; ++i) {
    const auto prod = static_cast<unsigned __int128>(p / i) * inv[p % i];
    inv[i] = static_cast<std::uint64_t>(p - static_cast<std::uint64_t>(prod % p));
  }
  std::vector<std::uint64_t> g(len, 0);
  if (len == 0) return g;
  g[0] = 1;
  const auto ip = static_cast<Int128>(p);
  for (std::size_t n = 1; n < len; ++n) {
    Int128 acc = 0;
    const auto nn = static_cast<std::int64_t>(n);
    for (std::size_t t = 1; t < cube.size() && cube[t].first <= n; ++t) {
      const auto j = static_cast<std::int64_t>(cube[t].first);
      acc += static_cast<Int128>((9 * j - nn) * cube[t].second) * static_cast<Int128>(g[n - cube[t].first]);
    }
    Int128 r = acc % ip;
    if (r < 0) r += ip;
    g[n] = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * inv[n]) % p);
  }
  return g;
}

}  // namespace

std::vector<Int128> tau_series(std::size_t limit) {
  if (limit > kTauLimit) {
    throw ResourceError("tau_series: limit " + std::to_string(limit) + " exceeds ceiling " +
                        std::to_string(kTauLimit));
  }
  // q prod (1 - q^k)^24 = q f^8 with f = prod (1 - q^k)^3 = sum_m (-1)^m (2m+1) q^{m(m+1)/2}.
  // |tau(n)| <= d(n) n^{11/2} < 2^118 for n <= 1e6, inside the CRT range of the two primes.
  constexpr std::uint64_t p1 = (std::uint64_t{1} << 61) - 1;
  constexpr std::uint64_t p2 = (std::uint64_t{1} << 62) - 57;
  const std::size_t len = limit;
  std::vector<std::pair<std::size_t, std::int64_t>> cube;
  for (std::size_t m = 0;; ++m) {
    const std::size_t e = m * (m + 1) / 2;
    if (e >= std::max<std::size_t>(len, 1)) break;
    cube.emplace_back(e, (m % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(2 * m + 1));
  }
  const auto g1 = jacobi_cube_power8_mod(len, p1, cube);
  const auto g2 = jacobi_cube_power8_mod(len, p2, cube);

  // inverse of p1 modulo p2 by Fermat
  auto powmod = [](std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    unsigned __int128 r = 1, x = b % m;
    while (e) {
      if (e & 1) r = r * x % m;
      x = x * x % m;
      e >>= 1;
    }
    return static_cast<std::uint64_t>(r);
  };
  const std::uint64_t p1InvMod2 = powmod(p1 % p2, p2 - 2, p2);
  const unsigned __int128 modulus = static_cast<unsigned __int128>(p1) * p2;

  std::vector<Int128> tau(limit + 1, 0);
  for (std::size_t n = 1; n <= limit; ++n) {
    const std::uint64_t a1 = g1[n - 1], a2 = g2[n - 1];
    const std::uint64_t diff = (a2 + p2 - a1 % p2) % p2;
    const auto k = static_cast<std::uint64_t>(static_cast<unsigned __int128>(diff) * p1InvMod2 % p2);
    const unsigned __int128 x = a1 + static_cast<unsigned __int128>(p1) * k;
    tau[n] = x > modulus / 2 ? -static_cast<Int128>(modulus - x) : static_cast<Int128>(x);
  }
  return tau;
}

CoefficientStream zeta_stream(std::size_t limit) {
  if (limit < 1) throw DomainError("zeta_stream: limit must be >= 1");
  CoefficientStream s;
  s.kind = StreamKind::Zeta;
  s.degree2A = 1.0;
  s.points.reserve(limit);
  const double sp = std::sqrt(std::numbers::pi);
  for (std::size_t n = 1; n <= limit; ++n) s.points.push_back({sp * static_cast<double>(n), 1.0});
  return s;
}

CoefficientStream zeta_squared_stream(std::size_t limit) {
  if (limit < 1) throw DomainError("zeta_squared_stream: limit must be >= 1");
  const auto d = divisor_counts(limit);
  CoefficientStream s;
  s.kind = StreamKind::ZetaSquared;
  s.degree2A = 2.0;
  s.points.reserve(limit);
  for (std::size_t n = 1; n <= limit; ++n) {
    s.points.push_back({std::numbers::pi * static_cast<double>(n), static_cast<double>(d[n])});
  }
  return s;
}

CoefficientStream delta_stream(std::size_t limit) {
  if (limit < 1) throw DomainError("delta_stream: limit must be >= 1");
  const auto tau = tau_series(limit);
  CoefficientStream s;
  s.kind = StreamKind::RamanujanDelta;
  s.degree2A = 2.0;
  s.points.reserve(limit);
  for (std::size_t n = 1; n <= limit; ++n) {
    const long double nn = static_cast<long double>(n);
    const long double a = static_cast<long double>(tau[n]) / std::pow(nn, 5.5L);
    s.points.push_back({2.0 * std::numbers::pi * static_cast<double>(n), static_cast<double>(a)});
  }
  return s;
}

CoefficientStream reindexed(const CoefficientStream& stream) {
  CoefficientStream out = stream;
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].lambda = static_cast<double>(i + 1);
  for (std::size_t i = 0; i < out.dualPoints.size(); ++i) out.dualPoints[i].lambda = static_cast<double>(i + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_field(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError("cannot parse number '" + std::string(field) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view row) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= row.size(); ++i) {
    if (i == row.size() || row[i] == ',') {
      out.push_back(row.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void append_checked(std::vector<CoefficientPoint>& pts, CoefficientPoint p, std::size_t line) {
  if (!(p.lambda > 0.0)) throw ParseError("frequency must be positive", line);
  if (!pts.empty() && !(p.lambda > pts.back().lambda)) {
    throw ParseError("frequency " + format_double(p.lambda) + " is not greater than previous " +
                         format_double(pts.back().lambda),
                     line);
  }
  pts.push_back(p);
}

CoefficientStream parse_csv(std::istream& in) {
  CoefficientStream s;
  std::string row;
  std::size_t line = 0;
  bool header = false;
  bool hasDual = false;
  while (std::getline(in, row)) {
    ++line;
    if (row.empty() || row == "\r" || row[0] == '#') continue;
    if (!header) {
      header = true;
      auto cols = split_csv(row);
      if (cols.size() >= 1 && cols[0].find("lambda") != std::string_view::npos) {
        hasDual = cols.size() >= 6;
        if (cols.size() != 3 && cols.size() != 6) throw ParseError("header must have 3 or 6 columns", line);
        continue;
      }
      throw ParseError("missing header 'lambda,aRe,aIm[,mu,bRe,bIm]'", line);
    }
    auto cols = split_csv(row);
    if (cols.size() != (hasDual ? 6u : 3u)) {
      throw ParseError("expected " + std::to_string(hasDual ? 6 : 3) + " columns, got " +
                           std::to_string(cols.size()),
                       line);
    }
    append_checked(s.points, {parse_field(cols[0], line), {parse_field(cols[1], line), parse_field(cols[2], line)}},
                   line);
    if (hasDual) {
      append_checked(s.dualPoints,
                     {parse_field(cols[3], line), {parse_field(cols[4], line), parse_field(cols[5], line)}}, line);
    }
  }
  if (!header || s.points.empty()) throw ParseError("no data rows", line);
  s.selfDual = !hasDual;
  return s;
}

std::vector<CoefficientPoint> parse_json_points(const nlohmann::json& arr) {
  std::vector<CoefficientPoint> pts;
  std::size_t idx = 0;
  for (const auto& e : arr) {
    ++idx;
    try {
      const double lambda = e.at("lambda").get<double>();
      const auto& a = e.at("a");
      append_checked(pts, {lambda, {a.at(0).get<double>(), a.at(1).get<double>()}}, idx);
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("malformed entry: ") + ex.what(), idx);
    }
  }
  return pts;
}

CoefficientStream parse_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 1);
  }
  CoefficientStream s;
  if (j.is_array()) {
    s.points = parse_json_points(j);
  } else if (j.is_object()) {
    if (!j.contains("points")) throw ParseError("JSON stream object needs a 'points' array", 1);
    s.points = parse_json_points(j.at("points"));
    if (j.contains("dual")) {
      s.dualPoints = parse_json_points(j.at("dual"));
      s.selfDual = false;
    }
    if (j.contains("metadata")) {
      const auto& meta = j.at("metadata");
      s.degree2A = meta.value("degree2A", 0.0);
      if (meta.value("selfDual", s.selfDual) && !s.selfDual) {
        throw DataError("metadata says selfDual but a separate dual array is present");
      }
    }
  } else {
    throw ParseError("JSON stream must be an array or object", 1);
  }
  return s;
}

}  // namespace

CoefficientStream parse_stream(std::istream& in, StreamFormat format) {
  CoefficientStream s = format == StreamFormat::CSV ? parse_csv(in) : parse_json(in);
  s.kind = StreamKind::FromFile;
  validate_stream(s);
  return s;
}

CoefficientStream ingest_stream(const std::string& path, StreamFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open coefficient file " + path);
  return parse_stream(in, format);
}

void export_stream(const CoefficientStream& stream, std::ostream& out, StreamFormat format) {
  if (format == StreamFormat::CSV) {
    out << (stream.selfDual ? "lambda,aRe,aIm\n" : "lambda,aRe,aIm,mu,bRe,bIm\n");
    for (std::size_t i = 0; i < stream.points.size(); ++i) {
      const auto& p = stream.points[i];
      out << format_double(p.lambda) << ',' << format_double(p.a.real()) << ',' << format_double(p.a.imag());
      if (!stream.selfDual) {
        if (i >= stream.dualPoints.size()) throw DataError("export: dual shorter than primal");
        const auto& q = stream.dualPoints[i];
        out << ',' << format_double(q.lambda) << ',' << format_double(q.a.real()) << ','
            << format_double(q.a.imag());
      }
      out << '\n';
    }
    return;
  }
  auto dump = [](const std::vector<CoefficientPoint>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({{"lambda", p.lambda}, {"a", {p.a.real(), p.a.imag()}}});
    return arr;
  };
  nlohmann::json j;
  j["points"] = dump(stream.points);
  if (!stream.selfDual) j["dual"] = dump(stream.dualPoints);
  j["metadata"] = {{"selfDual", stream.selfDual}, {"degree2A", stream.degree2A}};
  out << j.dump() << '\n';
}

double theta_m(int m) {
  if (m < 2) throw DomainError("theta_m: m must be >= 2");
  switch (m) {
    case 2: return 7.0 / 64.0;
    case 3: return 5.0 / 14.0;
    case 4: return 9.0 / 22.0;
    default: return 0.5 - 1.0 / (static_cast<double>(m) * m + 1.0);
  }
}

std::vector<GrcWarning> grc_check(const CoefficientStream& stream, int m) {
  const double theta = theta_m(m);
  const auto dm = divisor_counts_m(stream.size(), m);
  std::vector<GrcWarning> out;
  for (std::size_t n = 1; n <= stream.size(); ++n) {
    const double bound = dm[n] * std::pow(static_cast<double>(n), theta) * (1.0 + 1e-9);
    const double mag = std::abs(stream.points[n - 1].a);
    if (mag > bound) out.push_back({n, mag, bound});
  }
  return out;
}

std::string to_string(Int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace localmean
