#pragma once

#include <stdexcept>
#include <string>

namespace exgrad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::string_view what, long expected, long actual)
      : Error(std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An inner solver (projection, resolvent) did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ResolventError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point map produced a point outside its declared feasible set.
class MapRangeError : public Error {
 public:
  using Error::Error;
};

/// A schedule violates one of the hard convergence conditions.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

}  // namespace exgrad
