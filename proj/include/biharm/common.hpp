#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

// Extended precision: the discrete biharmonic operator on a 64x64 cell grid
// has norm ~1e9, so float64 storage alone puts a ~1e-8 floor on residuals.
using real = long double;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InternalConsistency : public Error {
 public:
  using Error::Error;
};

/// A problem hypothesis (dimension, exponent window, integrability, sign of
/// the forcing) does not hold.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// Iterative method hit its iteration cap. Carries the best residual reached.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, real best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}

  real best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  real best_residual_;
  int iterations_;
};

/// The Newton linearization is singular or too close to singular to solve.
class DegenerateLinearization : public Error {
 public:
  using Error::Error;
};

}  // namespace biharm
