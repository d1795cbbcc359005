#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "biharm/common.hpp"

namespace biharm {

/// Tensor grid on the rectangle [0,a] x [0,b] with nx*ny interior nodes.
///
/// Interior node (i,j), 1 <= i <= nx, 1 <= j <= ny, sits at (i*hx, j*hy).
/// Boundary nodes carry zero values and are never stored. Storage is
/// row-major: node (i,j) lives at offset (j-1)*nx + (i-1).
class Grid2D {
 public:
  Grid2D(real width, real height, std::size_t nx, std::size_t ny);

  real width() const noexcept { return width_; }
  real height() const noexcept { return height_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  real hx() const noexcept { return width_ / static_cast<real>(nx_ + 1); }
  real hy() const noexcept { return height_ / static_cast<real>(ny_ + 1); }
  real cell_area() const noexcept { return hx() * hy(); }
  std::size_t size() const noexcept { return nx_ * ny_; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    return (j - 1) * nx_ + (i - 1);
  }
  real x(std::size_t i) const noexcept { return static_cast<real>(i) * hx(); }
  real y(std::size_t j) const noexcept { return static_cast<real>(j) * hy(); }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  real width_;
  real height_;
  std::size_t nx_;
  std::size_t ny_;
};

Grid2D build_grid(real width, real height, std::size_t nx, std::size_t ny);

/// Grid function sampled on interior nodes.
class Field {
 public:
  explicit Field(const Grid2D& grid);  // zero field
  Field(const Grid2D& grid, std::vector<real> values);

  template <class Fn>
  static Field sample(const Grid2D& grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t j = 1; j <= grid.ny(); ++j)
      for (std::size_t i = 1; i <= grid.nx(); ++i)
        f.values_[grid.index(i, j)] = fn(grid.x(i), grid.y(j));
    return f;
  }
  static Field constant(const Grid2D& grid, real value);

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  real& operator[](std::size_t k) { return values_[k]; }
  real operator[](std::size_t k) const { return values_[k]; }
  real& at(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
  real at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

  std::span<real> values() noexcept { return values_; }
  std::span<const real> values() const noexcept { return values_; }

  real max_abs() const noexcept;
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(real scale);
  /// this += scale * other
  Field& add_scaled(real scale, const Field& other);

 private:
  Grid2D grid_;
  std::vector<real> values_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(real scale, Field f);
Field operator*(Field f, real scale);
/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

void require_same_grid(const Field& a, const Field& b, const char* where);

/// Rectangle rule over interior nodes: hx*hy*sum u*v.
real integrate(const Field& u, const Field& v);

inline constexpr real kInfinityNorm = std::numeric_limits<real>::infinity();

/// (hx*hy*sum |u|^q)^(1/q); q = kInfinityNorm gives max |u|.
real lp_norm(const Field& u, real q);

/// Copy of `u` scaled to unit L2 norm under `integrate`.
Field normalize_l2(const Field& u);

/// CSV with header `i,j,x,y,value`, one row per interior node, row-major.
void write_field_csv(std::ostream& os, const Field& f);
/// Reads the format written by write_field_csv. Lines starting with '#' are
/// ignored. Every interior node of `grid` must appear exactly once.
Field read_field_csv(std::istream& is, const Grid2D& grid);

}  // namespace biharm
