#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace projeq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise inadmissible numeric input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands of a binary operation disagree in variable count, order or
/// tensor shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested beyond what a jet carries.
class OrderExhaustedError : public Error {
 public:
  using Error::Error;
};

/// A jet function was applied outside the region where it is smooth
/// (division by zero, log of a non-positive value, ...). `operation()` names
/// the offending elementary function; `location()` is the byte offset of the
/// expression node that triggered it, when the error came from `expr::eval`.
class SingularInputError : public Error {
 public:
  SingularInputError(std::string operation, const std::string& detail,
                     std::optional<std::size_t> location = std::nullopt);

  const std::string& operation() const { return operation_; }
  std::optional<std::size_t> location() const { return location_; }

  SingularInputError with_location(std::size_t offset) const;

 private:
  std::string operation_;
  std::string detail_;
  std::optional<std::size_t> location_;
};

/// A metric (or another matrix that must be invertible) is degenerate at the
/// evaluation point.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression text. `offset()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string bare_;
  std::size_t offset_;
};

}  // namespace projeq
