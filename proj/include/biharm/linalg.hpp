#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/grid.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

/// Cholesky factor of a symmetric positive-definite banded matrix, stored by
/// rows within the band. Factor once, solve many times.
class BandedCholesky {
 public:
  /// Throws PreconditionViolation if the matrix is not symmetric or a pivot
  /// is not positive.
  explicit BandedCholesky(const SparseOperator& a);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  /// Solves A x = b; `b` and `x` may alias.
  void solve(std::span<const real> b, std::span<real> x) const;

 private:
  real& at(std::size_t i, std::size_t j) { return band_[i * (bw_ + 1) + (bw_ + j - i)]; }
  real at(std::size_t i, std::size_t j) const { return band_[i * (bw_ + 1) + (bw_ + j - i)]; }

  std::size_t dim_;
  std::size_t bw_;
  std::vector<real> band_;  // row i holds columns i-bw .. i of the lower factor
};

struct LinearSolveOptions {
  int max_iterations = 0;  // 0: 10 * dimension
  const BandedCholesky* preconditioner = nullptr;
};

/// Conjugate gradients for SPD A: returns u with ||A u - rhs||_2 <= tol ||rhs||_2.
/// Throws InvalidArgument for tol <= 0, NoConvergence at the iteration cap.
Field solve_linear(const SparseOperator& a, const Field& rhs, real tol,
                   const LinearSolveOptions& options = {});

struct MinresResult {
  std::vector<real> x;
  real relative_residual = 0;  // true ||b - A x|| / ||b||
  int iterations = 0;
  bool converged = false;       // recurrence estimate below tol and true residual below sqrt(tol)
  real condition_estimate = 0;  // of the preconditioned operator
};

/// Preconditioned MINRES for symmetric, possibly indefinite A. The
/// preconditioner must be SPD.
MinresResult minres(const SparseOperator& a, std::span<const real> b, real tol, int max_iterations,
                    const BandedCholesky* preconditioner = nullptr);

real dot(std::span<const real> a, std::span<const real> b);
real norm2(std::span<const real> a);

}  // namespace biharm
