#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace localmean {

// Base of everything the library throws. The CLI maps the subclasses onto
// exit codes (2 validation, 3 data, 4 numeric).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A detection window reaches below the configured threshold X0.
class ThresholdError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A gamma argument (or similar) came within the pole-distance guard.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid functional-equation spec:";
    for (const auto& s : v) out += " [" + s + "]";
    return out;
  }
  std::vector<std::string> violations_;
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(what + " (residual estimate " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Raised when the tail bound of a truncated series cannot be pushed below
// the requested tolerance within the term budget.
class TruncationError : public NumericError {
 public:
  TruncationError(const std::string& what, double achievedBound)
      : NumericError(what, achievedBound) {}

  double achievedBound() const noexcept { return residual(); }
};

// Oscillatory quadrature would need more nodes than its ceiling.
class OscillationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientDataError : public DataError {
 public:
  InsufficientDataError(const std::string& what, double requiredLambda)
      : DataError(what + " (need lambda up to " + std::to_string(requiredLambda) + ")"),
        requiredLambda_(requiredLambda) {}

  double requiredLambda() const noexcept { return requiredLambda_; }

 private:
  double requiredLambda_;
};

// Complex coefficients handed to a real-only scanner.
class CoefficientTypeError : public DataError {
 public:
  CoefficientTypeError(const std::string& what, std::size_t index)
      : DataError(what + " at index " + std::to_string(index)), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace localmean
