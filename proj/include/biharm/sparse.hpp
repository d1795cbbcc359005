#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/grid.hpp"

namespace biharm {

/// Square sparse matrix in compressed-row layout.
///
/// Column indices are strictly increasing within each row. When the
/// symmetry flag is set, entry (i,j) equals entry (j,i) bit for bit; the
/// constructor checks this.
class SparseOperator {
 public:
  SparseOperator(std::size_t dim, std::vector<std::size_t> row_ptr,
                 std::vector<std::size_t> col_idx, std::vector<real> values, bool symmetric);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const real> values() const noexcept { return values_; }

  std::size_t row_nonzeros(std::size_t row) const { return row_ptr_[row + 1] - row_ptr_[row]; }
  /// Entry (i,j), zero when not stored.
  real entry(std::size_t i, std::size_t j) const;
  std::vector<real> diagonal() const;
  /// Largest |i - j| over stored entries.
  std::size_t bandwidth() const noexcept;
  /// max_i sum_j |a_ij|
  real inf_norm() const noexcept;
  /// Exact transpose comparison of the stored pattern and values.
  bool is_exactly_symmetric() const;

  void apply(std::span<const real> x, std::span<real> y) const;
  Field apply(const Field& x) const;

  /// Copy with `shift[i]` added to each diagonal entry (diagonal must be stored).
  SparseOperator shifted_diagonal(std::span<const real> shift) const;
  /// Copy with entries a_ij * left[i] * right[j].
  SparseOperator scaled(std::span<const real> left, std::span<const real> right) const;

 private:
  std::size_t dim_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<real> values_;
  bool symmetric_;
};

/// Sparse-sparse product a*b. The result is flagged symmetric only when it is
/// exactly symmetric.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

/// 5-point Dirichlet Laplacian (approximates -Laplacian, SPD).
SparseOperator laplacian_matrix(const Grid2D& grid);

/// Navier biharmonic: the square of laplacian_matrix.
SparseOperator biharmonic_matrix(const Grid2D& grid);

}  // namespace biharm
