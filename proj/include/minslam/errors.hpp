#pragma once

#include <stdexcept>
#include <string>

namespace minslam {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite angle or otherwise malformed scalar input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Problem definition violates its invariants (coincident poses, zero measurements, sigma <= 0).
class InvalidProblem : public Error {
 public:
  using Error::Error;
};

// Rank-deficient design matrix or non-SPD covariance in a least-squares solve.
class SingularProblem : public Error {
 public:
  using Error::Error;
};

// Measurements are valid individually but yield a0 == 0.
class DegenerateProblem : public Error {
 public:
  using Error::Error;
};

// Point lies outside the fundamental square.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// An analytic routine was called on a problem that does not satisfy its assumptions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace minslam
