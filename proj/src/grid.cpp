#include "biharm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace biharm {

Grid2D::Grid2D(real width, real height, std::size_t nx, std::size_t ny)
    : width_(width), height_(height), nx_(nx), ny_(ny) {
  if (!(width > 0) || !(height > 0) || !std::isfinite(width) || !std::isfinite(height))
    throw InvalidArgument("grid: rectangle sides must be positive and finite");
  if (nx < 1 || ny < 1) throw InvalidArgument("grid: need at least one interior node per axis");
}

Grid2D build_grid(real width, real height, std::size_t nx, std::size_t ny) {
  return Grid2D(width, height, nx, ny);
}

Field::Field(const Grid2D& grid) : grid_(grid), values_(grid.size(), real{0}) {}

Field::Field(const Grid2D& grid, std::vector<real> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field: value count does not match grid");
  if (!all_finite()) throw InvalidArgument("field: non-finite value");
}

Field Field::constant(const Grid2D& grid, real value) {
  return Field(grid, std::vector<real>(grid.size(), value));
}

real Field::max_abs() const noexcept {
  real m = 0;
  for (real v : values_) m = std::max(m, std::fabs(v));
  return m;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](real v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) { return add_scaled(1, other); }
Field& Field::operator-=(const Field& other) { return add_scaled(-1, other); }

Field& Field::operator*=(real scale) {
  for (real& v : values_) v *= scale;
  return *this;
}

Field& Field::add_scaled(real scale, const Field& other) {
  require_same_grid(*this, other, "field arithmetic");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += scale * other.values_[k];
  return *this;
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(real scale, Field f) { return f *= scale; }
Field operator*(Field f, real scale) { return f *= scale; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b, "hadamard");
  Field out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid() == b.grid()))
    throw InvalidArgument(std::string(where) + ": fields live on different grids");
}

real integrate(const Field& u, const Field& v) {
  require_same_grid(u, v, "integrate");
  real sum = 0;
  for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * v[k];
  return u.grid().cell_area() * sum;
}

real lp_norm(const Field& u, real q) {
  if (std::isnan(q) || q < 1) throw InvalidArgument("lp_norm: exponent must be >= 1");
  if (std::isinf(q)) return u.max_abs();
  const real scale = u.max_abs();
  if (scale == 0) return 0;
  // Factor out the max to keep |u|^q representable for large q.
  real sum = 0;
  for (real v : u.values()) sum += std::pow(std::fabs(v) / scale, q);
  return scale * std::pow(u.grid().cell_area() * sum, 1 / q);
}

Field normalize_l2(const Field& u) {
  const real n = std::sqrt(integrate(u, u));
  if (n == 0) throw InvalidArgument("normalize_l2: zero field");
  return (1 / n) * u;
}

void write_field_csv(std::ostream& os, const Field& f) {
  const Grid2D& g = f.grid();
  os << "i,j,x,y,value\n";
  os << std::setprecision(21);
  for (std::size_t j = 1; j <= g.ny(); ++j)
    for (std::size_t i = 1; i <= g.nx(); ++i)
      os << i << ',' << j << ',' << g.x(i) << ',' << g.y(j) << ',' << f.at(i, j) << '\n';
}

Field read_field_csv(std::istream& is, const Grid2D& grid) {
  std::string line;
  bool have_header = false;
  std::vector<real> values(grid.size(), real{0});
  std::vector<bool> seen(grid.size(), false);
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != "i,j,x,y,value")
        throw InvalidArgument("field csv: expected header 'i,j,x,y,value'");
      have_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell[5];
    for (auto& c : cell)
      if (!std::getline(row, c, ','))
        throw InvalidArgument("field csv: short row at line " + std::to_string(line_no));
    std::size_t i = 0, j = 0;
    long double value = 0;
    try {
      i = std::stoul(cell[0]);
      j = std::stoul(cell[1]);
      value = std::stold(cell[4]);
    } catch (const std::exception&) {
      throw InvalidArgument("field csv: malformed row at line " + std::to_string(line_no));
    }
    if (i < 1 || i > grid.nx() || j < 1 || j > grid.ny())
      throw InvalidArgument("field csv: node outside grid at line " + std::to_string(line_no));
    const std::size_t k = grid.index(i, j);
    if (seen[k]) throw InvalidArgument("field csv: duplicate node at line " + std::to_string(line_no));
    seen[k] = true;
    values[k] = value;
  }
  if (!have_header) throw InvalidArgument("field csv: missing header");
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InvalidArgument("field csv: missing interior nodes");
  return Field(grid, std::move(values));
}

}  // namespace biharm
