#include "biharm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace biharm {

real dot(std::span<const real> a, std::span<const real> b) {
  real s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

real norm2(std::span<const real> a) { return std::sqrt(dot(a, a)); }

BandedCholesky::BandedCholesky(const SparseOperator& a)
    : dim_(a.dim()), bw_(a.bandwidth()), band_(a.dim() * (a.bandwidth() + 1), real{0}) {
  if (!a.symmetric()) throw PreconditionViolation("banded cholesky: matrix is not symmetric");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto av = a.values();
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      if (ci[k] <= i) at(i, ci[k]) = av[k];

  for (std::size_t i = 0; i < dim_; ++i) {
    const std::size_t jlo = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = jlo; j <= i; ++j) {
      real s = at(i, j);
      const std::size_t klo = std::max(jlo, j > bw_ ? j - bw_ : std::size_t{0});
      for (std::size_t k = klo; k < j; ++k) s -= at(i, k) * at(j, k);
      if (j == i) {
        if (!(s > 0)) throw PreconditionViolation("banded cholesky: matrix is not positive definite");
        at(i, i) = std::sqrt(s);
      } else {
        at(i, j) = s / at(j, j);
      }
    }
  }
}

void BandedCholesky::solve(std::span<const real> b, std::span<real> x) const {
  if (b.size() != dim_ || x.size() != dim_) throw InvalidArgument("banded cholesky: length mismatch");
  if (x.data() != b.data()) std::copy(b.begin(), b.end(), x.begin());
  for (std::size_t i = 0; i < dim_; ++i) {
    real s = x[i];
    for (std::size_t k = i > bw_ ? i - bw_ : 0; k < i; ++k) s -= at(i, k) * x[k];
    x[i] = s / at(i, i);
  }
  for (std::size_t ii = dim_; ii-- > 0;) {
    real s = x[ii];
    const std::size_t khi = std::min(dim_ - 1, ii + bw_);
    for (std::size_t k = ii + 1; k <= khi; ++k) s -= at(k, ii) * x[k];
    x[ii] = s / at(ii, ii);
  }
}

Field solve_linear(const SparseOperator& a, const Field& rhs, real tol,
                   const LinearSolveOptions& options) {
  if (!(tol > 0)) throw InvalidArgument("solve_linear: tolerance must be positive");
  if (a.dim() != rhs.size()) throw InvalidArgument("solve_linear: dimension mismatch");
  const std::size_t n = a.dim();
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);
  const BandedCholesky* pc = options.preconditioner;

  Field x(rhs.grid());
  const auto b = rhs.values();
  const real bnorm = norm2(b);
  if (bnorm == 0) return x;
  const real target = tol * bnorm;

  std::vector<real> r(b.begin(), b.end()), z(n), p(n), ap(n);
  auto precondition = [&] {
    if (pc) pc->solve(r, z);
    else z = r;
  };
  auto xs = x.values();
  real best = bnorm;
  int it = 0;
  // Outer loop restarts from the true residual if the recursive one drifted.
  while (it < max_iter) {
    precondition();
    p = z;
    real rz = dot(r, z);
    while (it < max_iter) {
      ++it;
      a.apply(p, ap);
      const real pap = dot(p, ap);
      if (!(pap > 0)) throw PreconditionViolation("solve_linear: operator is not positive definite");
      const real alpha = rz / pap;
      for (std::size_t k = 0; k < n; ++k) {
        xs[k] += alpha * p[k];
        r[k] -= alpha * ap[k];
      }
      const real rn = norm2(r);
      best = std::min(best, rn);
      if (rn <= target) break;
      precondition();
      const real rz_new = dot(r, z);
      const real beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    a.apply(xs, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    const real true_rn = norm2(r);
    best = std::min(best, true_rn);
    if (true_rn <= target) return x;
  }
  throw NoConvergence("solve_linear: iteration cap reached", best / bnorm, it);
}

MinresResult minres(const SparseOperator& a, std::span<const real> b, real tol, int max_iterations,
                    const BandedCholesky* preconditioner) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw InvalidArgument("minres: dimension mismatch");
  if (!(tol > 0)) throw InvalidArgument("minres: tolerance must be positive");
  MinresResult res;
  res.x.assign(n, 0);
  const real bnorm = norm2(b);
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  auto precondition = [&](std::span<const real> in, std::span<real> out) {
    if (preconditioner) preconditioner->solve(in, out);
    else std::copy(in.begin(), in.end(), out.begin());
  };

  constexpr real eps = std::numeric_limits<real>::epsilon();
  std::vector<real> r1(b.begin(), b.end()), r2 = r1, y(n), v(n), w(n, 0), w1(n), w2(n, 0);
  precondition(r1, y);
  const real beta1 = std::sqrt(dot(r1, y));
  if (!(beta1 > 0)) throw PreconditionViolation("minres: preconditioner is not positive definite");

  real oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1;
  real cs = -1, sn = 0, gmax = 0, gmin = std::numeric_limits<real>::max();
  int itn = 0;
  while (itn < max_iterations) {
    ++itn;
    const real s = 1 / beta;
    for (std::size_t k = 0; k < n; ++k) v[k] = s * y[k];
    a.apply(v, y);
    if (itn >= 2)
      for (std::size_t k = 0; k < n; ++k) y[k] -= (beta / oldb) * r1[k];
    const real alfa = dot(v, y);
    for (std::size_t k = 0; k < n; ++k) y[k] -= (alfa / beta) * r2[k];
    r1.swap(r2);
    r2 = y;
    precondition(r2, y);
    oldb = beta;
    const real beta2 = dot(r2, y);
    if (beta2 < 0) throw PreconditionViolation("minres: preconditioner is not positive definite");
    beta = std::sqrt(beta2);

    const real oldeps = epsln;
    const real delta = cs * dbar + sn * alfa;
    const real gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const real gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const real phi = cs * phibar;
    phibar = sn * phibar;

    const real denom = 1 / gamma;
    w1.swap(w2);
    w2.swap(w);
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * denom;
      res.x[k] += phi * w[k];
    }
    gmax = std::max(gmax, gamma);
    gmin = std::min(gmin, gamma);
    if (phibar <= tol * beta1 || beta == 0) break;
  }
  res.iterations = itn;
  res.condition_estimate = gmax / gmin;

  std::vector<real> ax(n);
  a.apply(res.x, ax);
  for (std::size_t k = 0; k < n; ++k) ax[k] = b[k] - ax[k];
  res.relative_residual = norm2(ax) / bnorm;
  // phibar measures the residual in the preconditioner norm. On a numerically
  // singular system it can fall below tol while the true residual is large, so
  // the true residual must also be small.
  res.converged = (phibar <= tol * beta1 || res.relative_residual <= tol) &&
                  res.relative_residual <= std::sqrt(tol);
  return res;
}

}  // namespace biharm
