#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/estimates.hpp"
#include "biharm/grid.hpp"
#include "biharm/sparse.hpp"

namespace biharm {

/// Spectral shadow of the local degree: the weighted eigenvalues of the
/// linearization weight g = lambda1^2 + p u_+^(p-1).
struct IndexCertificate {
  real mu1 = 0;
  real mu2 = 0;
  bool nondegenerate = false;  // no computed mu_j within 1e-8 of 1
  int index = 0;               // number of mu_j < 1
};

struct Solution {
  Field u;
  real residual_norm = 0;  // lp_norm(residual(u), 2)
  Decomposition decomposition;
  std::optional<IndexCertificate> index_certificate;
  int newton_iterations = 0;
};

struct ContinuationRecord {
  real tau = 0;
  real step = 0;
  int newton_iterations = 0;
  real residual = 0;
  real sup_norm = 0;
  real t_component = 0;
};

enum class ContinuationStatus { running, success, step_underflow, degenerate_linearization };

struct ContinuationTrace {
  std::vector<ContinuationRecord> records;
  ContinuationStatus status = ContinuationStatus::running;
  std::optional<real> failed_tau;  // target of the attempt that ended a failed run
};

std::string to_string(ContinuationStatus status);

/// Newton failed: the backtracking line search or the iteration cap gave out.
class NewtonFailure : public NoConvergence {
 public:
  NewtonFailure(const std::string& what, real best_residual, int iterations, std::vector<real> history)
      : NoConvergence(what, best_residual, iterations), history_(std::move(history)) {}
  /// Residual norm after each iteration, starting with the initial guess.
  const std::vector<real>& history() const noexcept { return history_; }

 private:
  std::vector<real> history_;
};

class ContinuationFailure : public Error {
 public:
  ContinuationFailure(const std::string& what, real tau, ContinuationTrace trace)
      : Error(what), tau_(tau), trace_(std::move(trace)) {}
  /// Homotopy parameter at which the failed attempt was made.
  real tau() const noexcept { return tau_; }
  const ContinuationTrace& trace() const noexcept { return trace_; }

 private:
  real tau_;
  ContinuationTrace trace_;
};

/// B u - lambda1^2 u - u_+^p - f, nodewise.
Field residual(const Field& u, const ProblemSpec& spec);

/// Solves B T = lambda1^2 u + u_+^p + f; fixed points are exactly the zeros
/// of residual().
Field fixed_point_map(const Field& u, const ProblemSpec& spec, real tol = 1e-14L);

/// Nodewise linearization weight lambda1^2 + p u_+^(p-1).
Field linearization_weight(const Field& u, const ProblemSpec& spec);

/// B - diag(lambda1^2 + p u_+^(p-1)); the derivative of u_+^p is taken as
/// zero on {u <= 0}.
SparseOperator linearization(const Field& u, const ProblemSpec& spec);

struct NewtonOptions {
  real linear_tol = 1e-14L;  // relative tolerance of each inner MINRES solve
  int max_linear_iterations = 500;
  /// Preconditioned condition estimate beyond which the step is refused.
  real degenerate_condition = 1e13L;
};

/// Damped semismooth Newton on residual(). Each step solves the symmetric
/// indefinite linearization with MINRES preconditioned by the biharmonic
/// factor, then backtracks on ||residual||_2.
///
/// Throws InvalidArgument (tol <= 0), DegenerateLinearization, or
/// NewtonFailure.
Solution newton_solve(const Field& u_start, const ProblemSpec& spec, real tol, int max_iter,
                      const NewtonOptions& options = {});

struct ReferenceForcing {
  Field forcing;   // -(t phi1)^p
  real lr_norm;    // lp_norm(forcing, r)
};

/// f1 = -(t phi1)^p, for which u = t phi1 is an exact solution.
ReferenceForcing reference_forcing(real t, const Field& phi1, real p, real r);

struct ContinuationOptions {
  int newton_max_iter = 25;
  int easy_newton_iterations = 3;  // a step this cheap counts as easy
  real min_step = 1e-6L;
  bool compute_certificate = true;
  NewtonOptions newton;
};

/// Tracks the solution of B u = lambda1^2 u + u_+^p + (1-tau) f + tau f1 from
/// the known solution u = t_ref phi1 at tau = 1 down to tau = 0.
///
/// The step starts at 1/steps, halves on Newton failure and doubles (capped
/// at 1/steps) after two consecutive easy steps; the predictor is the
/// previous solution. Throws ContinuationFailure carrying the partial trace
/// when the step underflows or the linearization degenerates.
std::pair<Solution, ContinuationTrace> homotopy_path(const ProblemSpec& spec, real t_ref, int steps,
                                                     real tol, const ContinuationOptions& options = {});

/// mu_1, mu_2 (and further mu_j while they stay below 1) of the weight
/// lambda1^2 + p u_+^(p-1).
IndexCertificate linearization_index(const Field& u, const ProblemSpec& spec, real eigen_tol = 1e-12L);
IndexCertificate index_from_weight(const Field& weight, const ProblemSpec& spec, real eigen_tol = 1e-12L);

/// `tau,step,newton_iters,residual,sup_norm,t_component`, then a `# status=`
/// line that also names the failed tau when there is one.
void write_trace_csv(std::ostream& os, const ContinuationTrace& trace);
/// key=value lines: residual, iterations, index certificate.
void write_solution_meta(std::ostream& os, const Solution& solution);

}  // namespace biharm
