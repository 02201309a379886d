#pragma once

#include <stdexcept>
#include <string>

namespace hyperexp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A singular point or exponent lives outside Q(i) and cannot be handled.
class UnsupportedAlgebraicSingularity : public Error {
 public:
  using Error::Error;
};

class TruncationTooShort : public Error {
 public:
  using Error::Error;
};

class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

class PathTooCloseToSingularity : public Error {
 public:
  using Error::Error;
};

/// Local series tail could not be bounded at the requested truncation order.
class TailBoundFailed : public Error {
 public:
  using Error::Error;
};

class DivergentSeriesSuspected : public Error {
 public:
  using Error::Error;
};

/// Raised by the combination phase when |U| exceeds the restart threshold.
class RestartRequested : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NonPolynomialCoefficient : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperexp
