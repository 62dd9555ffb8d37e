#pragma once

#include <stdexcept>
#include <string>

namespace jetprolong {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid dimension, order, or shape mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (e.g. rho not <= sigma).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit a singular point (zero divisor, log of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two expansions are taken about different base points.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// The linear part of a jet is singular.
class NotInvertibleError : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Expression or configuration text could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  /// Message used verbatim; position unknown.
  explicit ParseError(const std::string& what) : Error(what), position_(static_cast<std::size_t>(-1)) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace jetprolong
