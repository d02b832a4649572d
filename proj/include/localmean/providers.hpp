#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace localmean {

using cplx = std::complex<double>;
using Int128 = __int128;

enum class StreamKind { Zeta, ZetaSquared, RamanujanDelta, FromFile };

struct CoefficientPoint {
  double lambda = 0.0;
  cplx a{};
};

// Ordered (lambda_n, a_n) data with its dual (mu_n, b_n). Self-dual streams
// store the dual implicitly; dual() returns the primal points for them.
struct CoefficientStream {
  StreamKind kind = StreamKind::FromFile;
  std::vector<CoefficientPoint> points;
  std::vector<CoefficientPoint> dualPoints;
  bool selfDual = true;
  double degree2A = 0.0;  // 0 when unknown

  const std::vector<CoefficientPoint>& dual() const noexcept { return selfDual ? points : dualPoints; }
  std::size_t size() const noexcept { return points.size(); }
  double max_lambda() const noexcept { return points.empty() ? 0.0 : points.back().lambda; }
};

// Throws DataError when lambda is not strictly increasing or a_1 / b_1 is zero.
void validate_stream(const CoefficientStream& stream);

// d(n) for 0 <= n <= limit (index 0 unused).
std::vector<std::uint32_t> divisor_counts(std::size_t limit);

// d_m(n), the m-fold divisor function, for 0 <= n <= limit.
std::vector<double> divisor_counts_m(std::size_t limit, int m);

// tau(n) for 0 <= n <= limit (index 0 unused), exact.
std::vector<Int128> tau_series(std::size_t limit);

inline constexpr std::size_t kTauLimit = 1'000'000;

CoefficientStream zeta_stream(std::size_t limit);
CoefficientStream zeta_squared_stream(std::size_t limit);
CoefficientStream delta_stream(std::size_t limit);

// Same coefficients with lambda_n replaced by the position n (1-based).
CoefficientStream reindexed(const CoefficientStream& stream);

enum class StreamFormat { CSV, JSON };

CoefficientStream ingest_stream(const std::string& path, StreamFormat format);
CoefficientStream parse_stream(std::istream& in, StreamFormat format);
void export_stream(const CoefficientStream& stream, std::ostream& out, StreamFormat format);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// theta_m bound towards Ramanujan for GL_m (m >= 2).
double theta_m(int m);

struct GrcWarning {
  std::size_t index = 0;  // 1-based n
  double magnitude = 0.0;
  double bound = 0.0;
};

// Flags n with |a_n| > d_m(n) n^{theta_m} (1 + 1e-9), assuming lambda_n
// is proportional to n. Informational only.
std::vector<GrcWarning> grc_check(const CoefficientStream& stream, int m);

std::string to_string(Int128 v);

}  // namespace localmean
