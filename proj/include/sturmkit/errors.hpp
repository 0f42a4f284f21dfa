#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sturmkit {

/// Error categories; the CLI maps them onto exit codes:
/// usage -> 1, hypothesis -> 2, refusal -> 3, numeric -> 4.
enum class ErrorKind { usage, hypothesis, refusal, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Expression source text could not be parsed; offset is the byte position
/// in the input where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::usage, what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the real domain (log of a non-positive value, division by
/// zero, negative base with fractional exponent, ...) or produced a
/// non-finite value.  Evaluation never returns a silent NaN.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class UnboundParamError : public Error {
 public:
  explicit UnboundParamError(const std::string& name)
      : Error(ErrorKind::usage, "parameter '" + name + "' is unbound") {}
};

/// Arguments that make no sense for the requested operation (malformed
/// intervals, missing callables, matching points outside the interval).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// A theorem hypothesis failed (coefficient ordering violated, coefficients
/// identical, witness solution changes sign, ...).
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(ErrorKind::hypothesis, what) {}
};

/// A construction is refused on mathematical grounds (e.g. the endpoint
/// integrals diverge on both sides so no admissible generator exists), or
/// because an endpoint classification came back undecided.
class RefusalError : public Error {
 public:
  explicit RefusalError(const std::string& what) : Error(ErrorKind::refusal, what) {}
};

/// Numerical machinery failed: step-size underflow without a usable result,
/// quadrature nonconvergence, iteration caps.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

}  // namespace sturmkit
