#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wrlda {

/// Invalid configuration values (bad K, lambda out of range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad input data: unparsable files, out-of-range ids, missing annotations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data invariant (e.g. word id >= V).
class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

/// Non-finite values or other numerical breakdown during inference.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wrlda
