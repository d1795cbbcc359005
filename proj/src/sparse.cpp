#include "biharm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace biharm {

SparseOperator::SparseOperator(std::size_t dim, std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> col_idx, std::vector<real> values,
                               bool symmetric)
    : dim_(dim),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)),
      symmetric_(symmetric) {
  if (row_ptr_.size() != dim_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size())
    throw InvalidArgument("sparse operator: inconsistent array sizes");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1])
      throw InvalidArgument("sparse operator: row pointer decreases");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= dim_) throw InvalidArgument("sparse operator: column out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw InvalidArgument("sparse operator: columns not strictly increasing");
    }
  }
  if (symmetric_ && !is_exactly_symmetric())
    throw InvalidArgument("sparse operator: flagged symmetric but is not");
}

real SparseOperator::entry(std::size_t i, std::size_t j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<real> SparseOperator::diagonal() const {
  std::vector<real> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = entry(i, i);
  return d;
}

std::size_t SparseOperator::bandwidth() const noexcept {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = col_idx_[k];
      bw = std::max(bw, i > j ? i - j : j - i);
    }
  return bw;
}

real SparseOperator::inf_norm() const noexcept {
  real norm = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    real row = 0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) row += std::fabs(values_[k]);
    norm = std::max(norm, row);
  }
  return norm;
}

bool SparseOperator::is_exactly_symmetric() const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = col_idx_[k];
      const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j]);
      const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j + 1]);
      const auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) return false;
      if (values_[static_cast<std::size_t>(it - col_idx_.begin())] != values_[k]) return false;
    }
  return true;
}

void SparseOperator::apply(std::span<const real> x, std::span<real> y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw InvalidArgument("sparse operator: vector length mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    real sum = 0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[i] = sum;
  }
}

Field SparseOperator::apply(const Field& x) const {
  Field y(x.grid());
  apply(x.values(), y.values());
  return y;
}

SparseOperator SparseOperator::shifted_diagonal(std::span<const real> shift) const {
  if (shift.size() != dim_) throw InvalidArgument("shifted_diagonal: length mismatch");
  std::vector<real> vals = values_;
  for (std::size_t i = 0; i < dim_; ++i) {
    bool found = false;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (col_idx_[k] == i) {
        vals[k] += shift[i];
        found = true;
      }
    if (!found) throw InvalidArgument("shifted_diagonal: diagonal entry not stored");
  }
  return SparseOperator(dim_, row_ptr_, col_idx_, std::move(vals), symmetric_);
}

SparseOperator SparseOperator::scaled(std::span<const real> left, std::span<const real> right) const {
  if (left.size() != dim_ || right.size() != dim_)
    throw InvalidArgument("scaled: length mismatch");
  std::vector<real> vals = values_;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      vals[k] = vals[k] * (left[i] * right[col_idx_[k]]);
  // With left == right the grouped factor l_i*l_j commutes, so symmetry survives.
  SparseOperator out(dim_, row_ptr_, col_idx_, std::move(vals), false);
  out.symmetric_ = symmetric_ && out.is_exactly_symmetric();
  return out;
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("multiply: dimension mismatch");
  const std::size_t n = a.dim();
  const auto arp = a.row_ptr();
  const auto aci = a.col_idx();
  const auto av = a.values();
  const auto brp = b.row_ptr();
  const auto bci = b.col_idx();
  const auto bv = b.values();

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<real> values;
  std::map<std::size_t, real> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t ka = arp[i]; ka < arp[i + 1]; ++ka) {
      const std::size_t m = aci[ka];
      for (std::size_t kb = brp[m]; kb < brp[m + 1]; ++kb) row[bci[kb]] += av[ka] * bv[kb];
    }
    for (const auto& [j, v] : row) {
      if (v == 0) continue;
      col_idx.push_back(j);
      values.push_back(v);
    }
    row_ptr.push_back(col_idx.size());
  }
  SparseOperator probe(n, row_ptr, col_idx, values, false);
  const bool sym = probe.is_exactly_symmetric();
  return SparseOperator(n, std::move(row_ptr), std::move(col_idx), std::move(values), sym);
}

SparseOperator laplacian_matrix(const Grid2D& grid) {
  const std::size_t nx = grid.nx(), ny = grid.ny(), n = grid.size();
  const real cx = 1 / (grid.hx() * grid.hx());
  const real cy = 1 / (grid.hy() * grid.hy());
  const real diag = 2 * cx + 2 * cy;

  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<real> values;
  col_idx.reserve(5 * n);
  values.reserve(5 * n);
  auto push = [&](std::size_t col, real v) {
    col_idx.push_back(col);
    values.push_back(v);
  };
  for (std::size_t j = 1; j <= ny; ++j)
    for (std::size_t i = 1; i <= nx; ++i) {
      // Ascending column order: south, west, centre, east, north.
      if (j > 1) push(grid.index(i, j - 1), -cy);
      if (i > 1) push(grid.index(i - 1, j), -cx);
      push(grid.index(i, j), diag);
      if (i < nx) push(grid.index(i + 1, j), -cx);
      if (j < ny) push(grid.index(i, j + 1), -cy);
      row_ptr.push_back(col_idx.size());
    }
  return SparseOperator(n, std::move(row_ptr), std::move(col_idx), std::move(values), true);
}

SparseOperator biharmonic_matrix(const Grid2D& grid) {
  const SparseOperator lap = laplacian_matrix(grid);
  SparseOperator b = multiply(lap, lap);
  if (!b.symmetric()) throw InternalConsistency("biharmonic_matrix: L*L lost exact symmetry");
  return b;
}

}  // namespace biharm
