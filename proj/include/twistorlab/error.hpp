#pragma once

#include <stdexcept>
#include <string>

namespace twistorlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands live in Clifford algebras of different rank.
class RankMismatch : public Error {
public:
  RankMismatch(int a, int b)
      : Error("rank mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Input is not of the grade an operation requires.
class GradeError : public Error {
public:
  using Error::Error;
};

/// A numerical routine failed to reach its accuracy contract.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// A theorem hypothesis (r > 4, n != 8, kappa > 0) is not met.
class HypothesisError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace twistorlab
