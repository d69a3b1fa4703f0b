#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownNodeError : public Error {
 public:
  using Error::Error;
};

class MissingMappingError : public Error {
 public:
  using Error::Error;
};

class DomainMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidMorphismError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class SignatureMismatchError : public Error {
 public:
  using Error::Error;
};

class NotFibrationError : public Error {
 public:
  using Error::Error;
};

class NotSurjectiveError : public Error {
 public:
  using Error::Error;
};

class NotInjectiveError : public Error {
 public:
  using Error::Error;
};

class InvalidPartitionError : public Error {
 public:
  using Error::Error;
};

class DimsNotConstantError : public Error {
 public:
  using Error::Error;
};

/// Raised by the expression parser. Carries the byte offset of the
/// offending token and the set of tokens that would have been accepted.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Raised when a state becomes non-finite during integration.
class IntegrationError : public Error {
 public:
  IntegrationError(std::size_t step, const std::string& what);

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed input files. `line`/`column` are 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace netdyn
