#pragma once

#include <stdexcept>
#include <string>

namespace randset {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments, mismatched dimensions, malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Expression text that does not parse; carries position information.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column,
             std::string expected)
      : Error(what), line(line), column(column), expected(std::move(expected)) {}
  int line;
  int column;
  std::string expected;
};

// Evaluation outside an expression's domain (log of a nonpositive value,
// division by zero, ...). Raised instead of letting NaN propagate.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Point cloud too degenerate to fit even after regularization.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// A convex solve that did not reach an acceptable solution.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace randset
