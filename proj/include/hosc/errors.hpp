#pragma once

#include <stdexcept>
#include <string>

namespace hosc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad n, r <= 0, lambda == 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operand sizes do not conform.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Iterative solve stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved, int iterations)
      : Error(what), achieved_(achieved), iterations_(iterations) {}

  double achieved_residual() const noexcept { return achieved_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double achieved_;
  int iterations_;
};

/// CG met a direction with p^T A p <= 0.
class IndefiniteMatrix : public Error {
 public:
  using Error::Error;
};

/// Too few values to carry out a fit or a statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(want) +
                            ", got " + std::to_string(got));
}

}  // namespace hosc
