#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/grid.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

struct EigenPair {
  real value = 0;
  Field vector;       // unit L2 norm under integrate
  real residual = 0;  // ||A v - value v||_2 (quadrature norm)
};

/// k smallest eigenpairs of an SPD operator, nondecreasing.
///
/// Block inverse iteration with Rayleigh-Ritz on k plus guard vectors; the
/// inner solves use a banded Cholesky factor of A. A pair is accepted when
/// ||A v - lambda v|| <= tol * lambda. Each vector is sign-normalized so its
/// largest-magnitude entry is positive. Vectors within a cluster of equal
/// eigenvalues form an arbitrary orthonormal basis of the cluster.
std::vector<EigenPair> smallest_eigenpairs(const SparseOperator& a, const Grid2D& grid,
                                           std::size_t k, real tol, int max_sweeps = 1000);

/// Eigenpairs of B v = mu (m o v) for a strictly positive weight m.
struct WeightedSpectrum {
  Field weight;
  std::vector<real> values;     // mu_1 <= mu_2 <= ...
  std::vector<Field> vectors;   // integrate(v_i, m o v_j) = delta_ij
  std::vector<real> residuals;  // ||B v - mu (m o v)||_2
};

/// Solved on the symmetrized operator D^{-1/2} B D^{-1/2}, D = diag(m).
/// Throws InvalidArgument if some weight entry is not positive.
WeightedSpectrum weighted_eigenvalues(const SparseOperator& b, const Field& m, std::size_t k,
                                      real tol);

struct MonotonicityReport {
  std::vector<real> mu_lower;  // mu_j(m)
  std::vector<real> mu_upper;  // mu_j(m~)
  std::vector<real> gaps;      // mu_j(m) - mu_j(m~)
  std::vector<bool> strict;    // gaps[j] > 0

  bool all_strict() const;
};

/// Compares mu_j(m) against mu_j(m~) for j = 1..k, requiring m <= m~ pointwise
/// with strict inequality somewhere (PreconditionViolation otherwise).
MonotonicityReport check_weight_monotonicity(const SparseOperator& b, const Field& m,
                                             const Field& m_tilde, std::size_t k, real tol);

/// Fraction of nodes with |v| <= eps_rel * max|v|. The zero field gives 1.
real zero_set_fraction(const Field& v, real eps_rel);

/// `j,mu,residual` rows, j starting at 1.
void write_spectrum_csv(std::ostream& os, const std::vector<real>& values,
                        const std::vector<real>& residuals);

}  // namespace biharm
