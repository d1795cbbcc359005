#include "biharm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "biharm/eigen.hpp"
#include "biharm/linalg.hpp"

namespace biharm {
namespace {

real l2(const Field& f) { return lp_norm(f, 2); }

constexpr real kResonanceTol = 1e-8L;

}  // namespace

std::string to_string(ContinuationStatus status) {
  switch (status) {
    case ContinuationStatus::running: return "running";
    case ContinuationStatus::success: return "success";
    case ContinuationStatus::step_underflow: return "step_underflow";
    case ContinuationStatus::degenerate_linearization: return "degenerate_linearization";
  }
  return "unknown";
}

Field residual(const Field& u, const ProblemSpec& spec) {
  if (!(u.grid() == spec.grid())) throw InvalidArgument("residual: field lives on another grid");
  Field r = spec.disc().biharmonic.apply(u);
  const Field up = positive_part_power(u, spec.p());
  const Field& f = spec.forcing();
  const real l1sq = spec.lambda1_sq();
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = r[k] - l1sq * u[k] - up[k] - f[k];
  return r;
}

Field fixed_point_map(const Field& u, const ProblemSpec& spec, real tol) {
  if (!(u.grid() == spec.grid())) throw InvalidArgument("fixed_point_map: field lives on another grid");
  Field rhs = positive_part_power(u, spec.p());
  rhs.add_scaled(spec.lambda1_sq(), u);
  rhs += spec.forcing();
  LinearSolveOptions opts;
  opts.preconditioner = spec.disc().biharmonic_factor.get();
  return solve_linear(spec.disc().biharmonic, rhs, tol, opts);
}

Field linearization_weight(const Field& u, const ProblemSpec& spec) {
  Field g = positive_part_power(u, spec.p() - 1);
  g *= spec.p();
  for (std::size_t k = 0; k < g.size(); ++k) g[k] += spec.lambda1_sq();
  return g;
}

SparseOperator linearization(const Field& u, const ProblemSpec& spec) {
  if (!(u.grid() == spec.grid())) throw InvalidArgument("linearization: field lives on another grid");
  Field shift = linearization_weight(u, spec);
  shift *= -1;
  return spec.disc().biharmonic.shifted_diagonal(shift.values());
}

Solution newton_solve(const Field& u_start, const ProblemSpec& spec, real tol, int max_iter,
                      const NewtonOptions& options) {
  if (!(tol > 0)) throw InvalidArgument("newton_solve: tolerance must be positive");
  if (!(u_start.grid() == spec.grid())) throw InvalidArgument("newton_solve: start lives on another grid");

  Field u = u_start;
  Field r = residual(u, spec);
  real rn = l2(r);
  std::vector<real> history{rn};
  int iter = 0;
  while (!(rn <= tol)) {
    if (iter >= max_iter)
      throw NewtonFailure("newton_solve: iteration cap reached", *std::min_element(history.begin(), history.end()),
                          iter, history);
    const SparseOperator jac = linearization(u, spec);
    std::vector<real> rhs(r.values().begin(), r.values().end());
    for (real& v : rhs) v = -v;
    const MinresResult step = minres(jac, rhs, options.linear_tol, options.max_linear_iterations,
                                     spec.disc().biharmonic_factor.get());
    if (!step.converged || step.condition_estimate > options.degenerate_condition)
      throw DegenerateLinearization("newton_solve: linearization is singular or nearly so (condition estimate " +
                                    std::to_string(static_cast<double>(step.condition_estimate)) + ")");
    const Field delta(u.grid(), step.x);

    // Backtracking on ||residual||_2 with an Armijo-type sufficient decrease.
    real s = 1;
    for (;;) {
      Field trial = u;
      trial.add_scaled(s, delta);
      Field rt = residual(trial, spec);
      const real rtn = l2(rt);
      if (rtn <= (1 - 1e-4L * s) * rn) {
        u = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        break;
      }
      s /= 2;
      if (s < 0x1p-20L) {
        ++iter;
        history.push_back(rn);
        throw NewtonFailure("newton_solve: line search failed to reduce the residual",
                            *std::min_element(history.begin(), history.end()), iter, history);
      }
    }
    ++iter;
    history.push_back(rn);
  }
  Decomposition parts = decompose(u, spec.phi1());
  return Solution{std::move(u), rn, std::move(parts), std::nullopt, iter};
}

ReferenceForcing reference_forcing(real t, const Field& phi1, real p, real r) {
  if (!(t >= 0)) throw InvalidArgument("reference_forcing: t must be nonnegative");
  Field f = positive_part_power(t * phi1, p);
  f *= -1;
  const real norm = lp_norm(f, r);
  return ReferenceForcing{std::move(f), norm};
}

std::pair<Solution, ContinuationTrace> homotopy_path(const ProblemSpec& spec, real t_ref, int steps,
                                                     real tol, const ContinuationOptions& options) {
  if (steps < 1) throw InvalidArgument("homotopy_path: steps must be at least 1");
  if (!(t_ref > 0)) throw InvalidArgument("homotopy_path: t_ref must be positive");
  if (!(tol > 0)) throw InvalidArgument("homotopy_path: tolerance must be positive");

  const Field& phi1 = spec.phi1();
  const Field f1 = reference_forcing(t_ref, phi1, spec.p(), spec.r()).forcing;
  const Field& f = spec.forcing();

  auto spec_at = [&](real tau) {
    if (tau == 0) return spec;
    Field blend = (1 - tau) * f;
    blend.add_scaled(tau, f1);
    return spec.with_forcing(std::move(blend), SignCheck::skip);
  };

  ContinuationTrace trace;
  auto record = [&](real tau, real step, const Solution& sol) {
    trace.records.push_back(ContinuationRecord{tau, step, sol.newton_iterations, sol.residual_norm,
                                               sol.u.max_abs(), sol.decomposition.amplitude});
  };
  auto fail = [&](ContinuationStatus status, real tau, const std::string& why) {
    trace.status = status;
    trace.failed_tau = tau;
    throw ContinuationFailure("homotopy_path: " + why + " at tau=" + std::to_string(static_cast<double>(tau)),
                              tau, trace);
  };

  const real base = real{1} / steps;
  std::optional<Solution> start;
  try {
    start = newton_solve(t_ref * phi1, spec_at(1), tol, options.newton_max_iter, options.newton);
  } catch (const DegenerateLinearization&) {
    fail(ContinuationStatus::degenerate_linearization, 1, "degenerate linearization");
  } catch (const NewtonFailure&) {
    fail(ContinuationStatus::step_underflow, 1, "known solution did not converge");
  }
  Solution current = std::move(*start);
  record(1, 0, current);

  real tau = 1, step = base;
  int easy_streak = 0;
  while (tau > 0) {
    real tau_try = tau - step;
    if (tau_try < options.min_step * 1e-3L) tau_try = 0;
    try {
      Solution next = newton_solve(current.u, spec_at(tau_try), tol, options.newton_max_iter, options.newton);
      const real used = tau - tau_try;
      tau = tau_try;
      current = std::move(next);
      record(tau, used, current);
      easy_streak = current.newton_iterations <= options.easy_newton_iterations ? easy_streak + 1 : 0;
      if (easy_streak >= 2) {
        step = std::min(2 * step, base);
        easy_streak = 0;
      }
    } catch (const DegenerateLinearization&) {
      fail(ContinuationStatus::degenerate_linearization, tau_try, "degenerate linearization");
    } catch (const NewtonFailure&) {
      step /= 2;
      easy_streak = 0;
      if (step < options.min_step) fail(ContinuationStatus::step_underflow, tau_try, "step size underflow");
    }
  }
  trace.status = ContinuationStatus::success;
  if (options.compute_certificate) current.index_certificate = linearization_index(current.u, spec);
  return {std::move(current), std::move(trace)};
}

IndexCertificate index_from_weight(const Field& weight, const ProblemSpec& spec, real eigen_tol) {
  const std::size_t n = spec.grid().size();
  std::size_t k = std::min<std::size_t>(2, n);
  WeightedSpectrum ws = weighted_eigenvalues(spec.disc().biharmonic, weight, k, eigen_tol);
  while (ws.values.back() < 1 && k < std::min<std::size_t>(16, n)) {
    k = std::min<std::size_t>(2 * k, std::min<std::size_t>(16, n));
    ws = weighted_eigenvalues(spec.disc().biharmonic, weight, k, eigen_tol);
  }
  IndexCertificate cert;
  cert.mu1 = ws.values[0];
  cert.mu2 = ws.values.size() > 1 ? ws.values[1] : std::numeric_limits<real>::infinity();
  cert.nondegenerate = true;
  for (real mu : ws.values) {
    if (std::fabs(mu - 1) <= kResonanceTol) cert.nondegenerate = false;
    if (mu < 1) ++cert.index;
  }
  return cert;
}

IndexCertificate linearization_index(const Field& u, const ProblemSpec& spec, real eigen_tol) {
  return index_from_weight(linearization_weight(u, spec), spec, eigen_tol);
}

void write_trace_csv(std::ostream& os, const ContinuationTrace& trace) {
  os << "tau,step,newton_iters,residual,sup_norm,t_component\n" << std::setprecision(17);
  for (const ContinuationRecord& rec : trace.records)
    os << static_cast<double>(rec.tau) << ',' << static_cast<double>(rec.step) << ',' << rec.newton_iterations
       << ',' << static_cast<double>(rec.residual) << ',' << static_cast<double>(rec.sup_norm) << ','
       << static_cast<double>(rec.t_component) << '\n';
  os << "# status=" << to_string(trace.status);
  if (trace.failed_tau) os << " failed_tau=" << static_cast<double>(*trace.failed_tau);
  os << '\n';
}

void write_solution_meta(std::ostream& os, const Solution& solution) {
  os << std::setprecision(17);
  os << "residual=" << static_cast<double>(solution.residual_norm) << '\n';
  os << "newton_iterations=" << solution.newton_iterations << '\n';
  os << "t_component=" << static_cast<double>(solution.decomposition.amplitude) << '\n';
  os << "sup_norm=" << static_cast<double>(solution.u.max_abs()) << '\n';
  if (solution.index_certificate) {
    const IndexCertificate& c = *solution.index_certificate;
    os << "mu1=" << static_cast<double>(c.mu1) << '\n';
    os << "mu2=" << static_cast<double>(c.mu2) << '\n';
    os << "nondegenerate=" << (c.nondegenerate ? 1 : 0) << '\n';
    os << "index=" << c.index << '\n';
  }
}

}  // namespace biharm
