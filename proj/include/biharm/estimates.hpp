#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/grid.hpp"
#include "biharm/linalg.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

// ---------------------------------------------------------------------------
// Hypotheses and exponents. N is the analysis dimension of the existence
// theory; it is independent of the 2D grid used for the PDE experiments.
// ---------------------------------------------------------------------------

struct HypothesisReport {
  int dimension = 0;
  real p = 0;
  real r = 0;
  real p_lower = 0;  // max{1, 4/(N-4)}
  real p_upper = 0;  // (N+1)/(N-3)
  real r_min = 0;    // N/3
  bool dimension_ok = false;  // N > 5
  bool p_ok = false;          // p_lower < p < p_upper
  bool r_ok = false;          // r > N/3

  bool all_pass() const noexcept { return dimension_ok && p_ok && r_ok; }
  /// Names of the failed conditions, comma separated; empty when all pass.
  std::string failures() const;
};

/// Never throws; a failed condition is a report entry.
HypothesisReport check_hypotheses(int dimension, real p, real r);

/// Exponents of the a priori estimate for given (N, p).
struct ExponentBundle {
  int dimension = 0;
  real p = 0;
  real source_exponent = 0;  // s = (p+1)/p
  real sobolev_gap = 0;      // L = p/(p+1) - 4/N
  real holder_split = 0;     // alpha, in (0,1)
  real weight_exponent = 0;  // tau, power of phi1 in the weighted norm, in [0,1]
  real target_exponent = 0;  // t = p + 1/(1-alpha), Lebesgue exponent of u/phi1^tau
  real young_exponent = 0;   // theta, 1/theta = [p(1-alpha)+1] p/(p+1)
  real young_conjugate = 0;  // theta/(theta-1)
};

/// Requires N > 5 and p strictly inside the exponent window (InvalidArgument
/// naming the failed condition otherwise). Every invariant is checked before
/// returning (InternalConsistency on failure).
ExponentBundle exponent_bundle(int dimension, real p);

/// `N,p,r,s,L,alpha,tau,t,theta,pass` table.
void write_hypotheses_csv_header(std::ostream& os);
void write_hypotheses_csv_row(std::ostream& os, const HypothesisReport& report);

// ---------------------------------------------------------------------------
// Discretized problem data.
// ---------------------------------------------------------------------------

/// Operators and principal spectral data of one grid. Immutable; share it.
struct Discretization {
  Grid2D grid;
  SparseOperator laplacian;
  SparseOperator biharmonic;
  std::shared_ptr<const BandedCholesky> biharmonic_factor;
  real lambda1 = 0;     // first Dirichlet Laplacian eigenvalue
  real lambda1_sq = 0;  // first biharmonic eigenvalue (= lambda1^2)
  real lambda2_sq = 0;  // second biharmonic eigenvalue
  Field phi1;           // positive, unit L2 norm
  real eigen_tol = 0;
};

std::shared_ptr<const Discretization> discretize(const Grid2D& grid, real eigen_tol = 1e-12L);

enum class SignCheck { enforce, skip };

/// Semilinear problem B u = lambda1^2 u + u_+^p + f on a discretization.
class ProblemSpec {
 public:
  /// Validates N > 5, the p window, r > N/3 and (unless skipped)
  /// integrate(f, phi1) < 0; throws HypothesisViolation naming the failure.
  static ProblemSpec create(std::shared_ptr<const Discretization> disc, int dimension, real p,
                            real r, Field forcing, SignCheck sign_check = SignCheck::enforce);

  /// Same parameters, different forcing (validated the same way).
  ProblemSpec with_forcing(Field forcing, SignCheck sign_check = SignCheck::enforce) const;

  const Discretization& disc() const noexcept { return *disc_; }
  const std::shared_ptr<const Discretization>& disc_ptr() const noexcept { return disc_; }
  const Grid2D& grid() const noexcept { return disc_->grid; }
  int dimension() const noexcept { return dimension_; }
  real p() const noexcept { return p_; }
  real r() const noexcept { return r_; }
  const Field& forcing() const noexcept { return forcing_; }
  const Field& phi1() const noexcept { return disc_->phi1; }
  real lambda1_sq() const noexcept { return disc_->lambda1_sq; }
  real lambda2_sq() const noexcept { return disc_->lambda2_sq; }

 private:
  ProblemSpec(std::shared_ptr<const Discretization> disc, int dimension, real p, real r, Field forcing)
      : disc_(std::move(disc)), dimension_(dimension), p_(p), r_(r), forcing_(std::move(forcing)) {}

  std::shared_ptr<const Discretization> disc_;
  int dimension_;
  real p_;
  real r_;
  Field forcing_;
};

// ---------------------------------------------------------------------------
// Estimate quantities.
// ---------------------------------------------------------------------------

/// u = t phi1 + u1 with integrate(u1, phi1) = 0.
struct Decomposition {
  real amplitude = 0;  // t
  Field u1;
};

Decomposition decompose(const Field& u, const Field& phi1);

/// max(u, 0)^q nodewise.
Field positive_part_power(const Field& u, real q);

/// |integrate(u_+^p, phi1) + integrate(f, phi1)|; vanishes on solutions.
real resonance_identity_residual(const Field& u, const ProblemSpec& spec);

/// lp_norm(u, s) + lp_norm(L u, s) + lp_norm(B u, s).
real w4s_norm(const Field& u, const SparseOperator& laplacian, const SparseOperator& biharmonic, real s);

/// lp_norm(u / phi1^tau, t) / w4s_norm(u). Throws InvalidArgument for u = 0
/// or a non-positive phi1.
real hardy_sobolev_ratio(const Field& u, const Field& phi1, const ExponentBundle& bundle,
                         const SparseOperator& laplacian, const SparseOperator& biharmonic);
/// Convenience overload assembling the operators from the grid.
real hardy_sobolev_ratio(const Field& u, const Field& phi1, const ExponentBundle& bundle,
                         const Grid2D& grid);

/// ((lambda2^2 - lambda1^2)/p)^(1/(p-1)).
real nondegeneracy_radius(real lambda1_sq, real lambda2_sq, real p);

/// integrate(f, phi1); the problem requires it to be negative.
real sign_condition(const Field& f, const Field& phi1);

}  // namespace biharm
