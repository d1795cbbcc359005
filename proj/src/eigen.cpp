#include "biharm/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "biharm/linalg.hpp"

namespace biharm {
namespace {

using Block = std::vector<std::vector<real>>;

// Deterministic start vectors, independent of any global RNG state.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  real uniform() {  // [-1, 1)
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<real>(z >> 11) * 0x1.0p-52L - 1;
  }

 private:
  std::uint64_t state_;
};

// Cyclic Jacobi for a small dense symmetric matrix (row-major m x m).
// Returns eigenvalues ascending; columns of `q` are the eigenvectors.
std::vector<real> jacobi_eigen(std::vector<real> h, std::size_t m, std::vector<real>& q) {
  q.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i) q[i * m + i] = 1;
  auto H = [&](std::size_t i, std::size_t j) -> real& { return h[i * m + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    real off = 0, scale = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) (i == j ? scale : off) += H(i, j) * H(i, j);
    if (off <= std::numeric_limits<real>::epsilon() * std::numeric_limits<real>::epsilon() * scale)
      break;
    for (std::size_t p = 0; p + 1 < m; ++p)
      for (std::size_t r = p + 1; r < m; ++r) {
        if (H(p, r) == 0) continue;
        const real theta = (H(r, r) - H(p, p)) / (2 * H(p, r));
        const real t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const real c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const real hkp = H(k, p), hkr = H(k, r);
          H(k, p) = c * hkp - s * hkr;
          H(k, r) = s * hkp + c * hkr;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const real hpk = H(p, k), hrk = H(r, k);
          H(p, k) = c * hpk - s * hrk;
          H(r, k) = s * hpk + c * hrk;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const real qkp = q[k * m + p], qkr = q[k * m + r];
          q[k * m + p] = c * qkp - s * qkr;
          q[k * m + r] = s * qkp + c * qkr;
        }
      }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return H(a, a) < H(b, b); });
  std::vector<real> vals(m), qs(m * m);
  for (std::size_t c = 0; c < m; ++c) {
    vals[c] = H(order[c], order[c]);
    for (std::size_t k = 0; k < m; ++k) qs[k * m + c] = q[k * m + order[c]];
  }
  q.swap(qs);
  return vals;
}

// Modified Gram-Schmidt, two passes. Columns that collapse are replaced by
// fresh random directions.
void orthonormalize(Block& x, SplitMix& rng) {
  for (std::size_t c = 0; c < x.size(); ++c) {
    for (int attempt = 0;; ++attempt) {
      const real before = norm2(x[c]);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t prev = 0; prev < c; ++prev) {
          const real d = dot(x[prev], x[c]);
          for (std::size_t k = 0; k < x[c].size(); ++k) x[c][k] -= d * x[prev][k];
        }
      const real nrm = norm2(x[c]);
      if (nrm > 1e-10L * before && nrm > 0) {
        for (real& v : x[c]) v /= nrm;
        break;
      }
      if (attempt > 10) throw InternalConsistency("eigen: could not build an orthonormal block");
      for (real& v : x[c]) v = rng.uniform();
    }
  }
}

void sign_normalize(std::vector<real>& v) {
  std::size_t arg = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::fabs(v[k]) > std::fabs(v[arg])) arg = k;
  if (v[arg] < 0)
    for (real& e : v) e = -e;
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const SparseOperator& a, const Grid2D& grid,
                                           std::size_t k, real tol, int max_sweeps) {
  const std::size_t n = a.dim();
  if (n != grid.size()) throw InvalidArgument("smallest_eigenpairs: operator does not match grid");
  if (k < 1 || k > n) throw InvalidArgument("smallest_eigenpairs: k must lie in [1, dimension]");
  if (!(tol > 0)) throw InvalidArgument("smallest_eigenpairs: tolerance must be positive");

  const BandedCholesky factor(a);
  const std::size_t m = std::min(n, k + std::max<std::size_t>(2, k));

  SplitMix rng(0x5eedULL + n);
  Block x(m, std::vector<real>(n));
  for (std::size_t c = 0; c < m; ++c)
    for (real& v : x[c]) v = c == 0 ? 1 + real{0.1} * rng.uniform() : rng.uniform();
  orthonormalize(x, rng);

  Block ax(m, std::vector<real>(n));
  std::vector<real> theta, q, hmat(m * m), res(k);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (auto& col : x) factor.solve(col, col);
    orthonormalize(x, rng);
    for (std::size_t c = 0; c < m; ++c) a.apply(x[c], ax[c]);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        const real hij = (dot(x[i], ax[j]) + dot(x[j], ax[i])) / 2;
        hmat[i * m + j] = hij;
        hmat[j * m + i] = hij;
      }
    theta = jacobi_eigen(hmat, m, q);

    Block nx(m, std::vector<real>(n, 0)), nax(m, std::vector<real>(n, 0));
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t j = 0; j < m; ++j) {
        const real qc = q[j * m + c];
        for (std::size_t e = 0; e < n; ++e) {
          nx[c][e] += qc * x[j][e];
          nax[c][e] += qc * ax[j][e];
        }
      }
    x.swap(nx);
    ax.swap(nax);

    bool done = true;
    for (std::size_t c = 0; c < k; ++c) {
      real r2 = 0;
      for (std::size_t e = 0; e < n; ++e) {
        const real d = ax[c][e] - theta[c] * x[c][e];
        r2 += d * d;
      }
      res[c] = std::sqrt(r2);
      if (!(res[c] <= tol * std::fabs(theta[c]))) done = false;
    }
    if (!done) continue;

    // The Ritz vectors are orthonormal in the Euclidean product; rescale to
    // unit quadrature norm. The residual is invariant under that rescaling.
    const real scale = 1 / std::sqrt(grid.cell_area());
    std::vector<EigenPair> out;
    out.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<real> v = x[c];
      sign_normalize(v);
      for (real& e : v) e *= scale;
      out.push_back(EigenPair{theta[c], Field(grid, std::move(v)), res[c]});
    }
    return out;
  }
  const real worst = *std::max_element(res.begin(), res.end());
  throw NoConvergence("smallest_eigenpairs: sweep cap reached", worst, max_sweeps);
}

WeightedSpectrum weighted_eigenvalues(const SparseOperator& b, const Field& m, std::size_t k,
                                      real tol) {
  if (b.dim() != m.size()) throw InvalidArgument("weighted_eigenvalues: weight does not match operator");
  std::vector<real> inv_sqrt(m.size());
  for (std::size_t e = 0; e < m.size(); ++e) {
    if (!(m[e] > 0)) throw InvalidArgument("weighted_eigenvalues: weight must be strictly positive");
    inv_sqrt[e] = 1 / std::sqrt(m[e]);
  }
  const SparseOperator sym = b.scaled(inv_sqrt, inv_sqrt);
  if (!sym.symmetric()) throw InternalConsistency("weighted_eigenvalues: symmetrization lost symmetry");

  WeightedSpectrum out{m, {}, {}, {}};
  for (EigenPair& pair : smallest_eigenpairs(sym, m.grid(), k, tol)) {
    Field v = std::move(pair.vector);
    for (std::size_t e = 0; e < v.size(); ++e) v[e] *= inv_sqrt[e];
    Field r = b.apply(v);
    r.add_scaled(-pair.value, hadamard(m, v));
    out.values.push_back(pair.value);
    out.residuals.push_back(std::sqrt(integrate(r, r)));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

bool MonotonicityReport::all_strict() const {
  return std::all_of(strict.begin(), strict.end(), [](bool s) { return s; });
}

MonotonicityReport check_weight_monotonicity(const SparseOperator& b, const Field& m,
                                             const Field& m_tilde, std::size_t k, real tol) {
  require_same_grid(m, m_tilde, "check_weight_monotonicity");
  bool somewhere_strict = false;
  for (std::size_t e = 0; e < m.size(); ++e) {
    if (m[e] > m_tilde[e])
      throw PreconditionViolation("check_weight_monotonicity: m exceeds m~ at node " + std::to_string(e));
    if (m[e] < m_tilde[e]) somewhere_strict = true;
  }
  if (!somewhere_strict) throw PreconditionViolation("check_weight_monotonicity: weights are identical");

  const WeightedSpectrum lower = weighted_eigenvalues(b, m, k, tol);
  const WeightedSpectrum upper = weighted_eigenvalues(b, m_tilde, k, tol);
  MonotonicityReport report;
  report.mu_lower = lower.values;
  report.mu_upper = upper.values;
  for (std::size_t j = 0; j < k; ++j) {
    const real gap = lower.values[j] - upper.values[j];
    report.gaps.push_back(gap);
    report.strict.push_back(gap > 0);
  }
  return report;
}

real zero_set_fraction(const Field& v, real eps_rel) {
  if (eps_rel < 0) throw InvalidArgument("zero_set_fraction: eps_rel must be nonnegative");
  const real vmax = v.max_abs();
  if (vmax == 0) return 1;
  const real cut = eps_rel * vmax;
  std::size_t zeros = 0;
  for (real e : v.values())
    if (std::fabs(e) <= cut) ++zeros;
  return static_cast<real>(zeros) / static_cast<real>(v.size());
}

void write_spectrum_csv(std::ostream& os, const std::vector<real>& values,
                        const std::vector<real>& residuals) {
  os << "j,mu,residual\n" << std::setprecision(21);
  for (std::size_t j = 0; j < values.size(); ++j)
    os << j + 1 << ',' << values[j] << ',' << (j < residuals.size() ? residuals[j] : real{0}) << '\n';
}

}  // namespace biharm
