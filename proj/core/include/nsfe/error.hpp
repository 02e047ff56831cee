#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nsfe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An operation was asked to run outside the regime (dense/sparse) it is defined for.
class WrongRegime : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

/// Remez exchange failed to level the residual within the iteration cap.
/// Carries the residual at the last reference so callers can inspect it.
class ConvergenceError : public Error {
 public:
  struct Sample {
    double u;
    double residual;
  };

  ConvergenceError(const std::string& what, std::vector<Sample> profile)
      : Error(what), profile_(std::move(profile)) {}

  const std::vector<Sample>& profile() const noexcept { return profile_; }

 private:
  std::vector<Sample> profile_;
};

/// Exact approximation (delta == 0): no alternation set exists.
class DegenerateApproximation : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class CertificationError : public Error {
 public:
  using Error::Error;
};

class DiagnosticError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  /// 1-based line number of the offending input, 0 when not line-oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsfe
