#include "biharm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "biharm/eigen.hpp"

namespace biharm {

std::string HypothesisReport::failures() const {
  std::string out;
  auto add = [&](const char* name) {
    if (!out.empty()) out += ", ";
    out += name;
  };
  if (!dimension_ok) add("dimension N > 5");
  if (!p_ok) add("exponent window max{1, 4/(N-4)} < p < (N+1)/(N-3)");
  if (!r_ok) add("integrability r > N/3");
  return out;
}

HypothesisReport check_hypotheses(int dimension, real p, real r) {
  HypothesisReport rep;
  rep.dimension = dimension;
  rep.p = p;
  rep.r = r;
  const real n = dimension;
  rep.dimension_ok = dimension > 5;
  if (dimension > 4) {
    rep.p_lower = std::max<real>(1, 4 / (n - 4));
  } else {
    rep.p_lower = std::numeric_limits<real>::infinity();
  }
  rep.p_upper = dimension > 3 ? (n + 1) / (n - 3) : std::numeric_limits<real>::infinity();
  rep.r_min = n / 3;
  rep.p_ok = rep.dimension_ok && rep.p_lower < p && p < rep.p_upper;
  rep.r_ok = r > rep.r_min;
  return rep;
}

ExponentBundle exponent_bundle(int dimension, real p) {
  const HypothesisReport hyp = check_hypotheses(dimension, p, std::numeric_limits<real>::infinity());
  if (!hyp.dimension_ok) throw InvalidArgument("exponent_bundle: violated dimension N > 5");
  if (!hyp.p_ok)
    throw InvalidArgument("exponent_bundle: violated exponent window max{1, 4/(N-4)} < p < (N+1)/(N-3)");

  const real n = dimension;
  ExponentBundle b;
  b.dimension = dimension;
  b.p = p;
  b.source_exponent = (p + 1) / p;
  b.sobolev_gap = p / (p + 1) - 4 / n;
  const real nl = n * b.sobolev_gap;
  const real numer = n - nl - nl * p;
  b.holder_split = numer / (1 + n - p * nl);
  b.weight_exponent = numer / (1 + n + p);
  b.target_exponent = (1 + n + p) / (1 + nl);
  b.young_exponent = 1 / ((p * (1 - b.holder_split) + 1) * p / (p + 1));
  b.young_conjugate = b.young_exponent / (b.young_exponent - 1);

  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "exponent_bundle(N=" << dimension << ", p=" << static_cast<double>(p) << "): " << what;
    throw InternalConsistency(msg.str());
  };
  constexpr real kIdentityTol = 1e-12L;
  if (!(b.sobolev_gap > 0)) fail("L must be positive");
  if (!(b.holder_split > 0 && b.holder_split < 1)) fail("alpha outside (0,1)");
  if (!(b.weight_exponent >= 0 && b.weight_exponent <= 1)) fail("tau outside [0,1]");
  if (!(b.young_exponent > 1)) fail("theta must exceed 1");
  const real sobolev_lhs = 1 / b.target_exponent;
  const real sobolev_rhs = 1 / b.source_exponent - (4 - b.weight_exponent) / n;
  if (std::fabs(sobolev_lhs - sobolev_rhs) > kIdentityTol) fail("1/t != 1/s - (4-tau)/N");
  const real t_alt = p + 1 / (1 - b.holder_split);
  if (std::fabs(b.target_exponent - t_alt) > kIdentityTol * b.target_exponent)
    fail("t != p + 1/(1-alpha)");
  const real tau_t = b.weight_exponent * b.target_exponent;
  const real alpha_ratio = b.holder_split / (1 - b.holder_split);
  if (std::fabs(tau_t - alpha_ratio) > kIdentityTol * std::max<real>(1, alpha_ratio))
    fail("tau*t != alpha/(1-alpha)");
  return b;
}

void write_hypotheses_csv_header(std::ostream& os) { os << "N,p,r,s,L,alpha,tau,t,theta,pass\n"; }

void write_hypotheses_csv_row(std::ostream& os, const HypothesisReport& report) {
  os << std::setprecision(17) << report.dimension << ',' << static_cast<double>(report.p) << ','
     << static_cast<double>(report.r) << ',';
  if (report.all_pass()) {
    const ExponentBundle b = exponent_bundle(report.dimension, report.p);
    for (real v : {b.source_exponent, b.sobolev_gap, b.holder_split, b.weight_exponent,
                   b.target_exponent, b.young_exponent})
      os << static_cast<double>(v) << ',';
    os << "1\n";
  } else {
    os << ",,,,,,0\n";
  }
}

std::shared_ptr<const Discretization> discretize(const Grid2D& grid, real eigen_tol) {
  SparseOperator lap = laplacian_matrix(grid);
  SparseOperator bih = biharmonic_matrix(grid);
  auto factor = std::make_shared<const BandedCholesky>(bih);
  const std::size_t k = std::min<std::size_t>(2, grid.size());
  std::vector<EigenPair> pairs = smallest_eigenpairs(bih, grid, k, eigen_tol);
  const real l2 = k > 1 ? pairs[1].value : std::numeric_limits<real>::infinity();
  const real l1sq = pairs[0].value;
  Field phi1 = std::move(pairs[0].vector);
  return std::make_shared<const Discretization>(Discretization{grid, std::move(lap), std::move(bih),
                                                               std::move(factor), std::sqrt(l1sq), l1sq,
                                                               l2, std::move(phi1), eigen_tol});
}

ProblemSpec ProblemSpec::create(std::shared_ptr<const Discretization> disc, int dimension, real p,
                                real r, Field forcing, SignCheck sign_check) {
  if (!disc) throw InvalidArgument("problem spec: missing discretization");
  if (!(forcing.grid() == disc->grid)) throw InvalidArgument("problem spec: forcing lives on another grid");
  const HypothesisReport hyp = check_hypotheses(dimension, p, r);
  if (!hyp.all_pass()) throw HypothesisViolation("problem spec: violated " + hyp.failures());
  if (sign_check == SignCheck::enforce && !(sign_condition(forcing, disc->phi1) < 0))
    throw HypothesisViolation("problem spec: violated sign condition integral(f phi1) < 0");
  return ProblemSpec(std::move(disc), dimension, p, r, std::move(forcing));
}

ProblemSpec ProblemSpec::with_forcing(Field forcing, SignCheck sign_check) const {
  return create(disc_, dimension_, p_, r_, std::move(forcing), sign_check);
}

Decomposition decompose(const Field& u, const Field& phi1) {
  const real t = integrate(u, phi1);
  Field u1 = u;
  u1.add_scaled(-t, phi1);
  return Decomposition{t, std::move(u1)};
}

Field positive_part_power(const Field& u, real q) {
  Field out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k] > 0 ? std::pow(u[k], q) : real{0};
  return out;
}

real resonance_identity_residual(const Field& u, const ProblemSpec& spec) {
  const Field& phi1 = spec.phi1();
  return std::fabs(integrate(positive_part_power(u, spec.p()), phi1) + integrate(spec.forcing(), phi1));
}

real w4s_norm(const Field& u, const SparseOperator& laplacian, const SparseOperator& biharmonic, real s) {
  return lp_norm(u, s) + lp_norm(laplacian.apply(u), s) + lp_norm(biharmonic.apply(u), s);
}

real hardy_sobolev_ratio(const Field& u, const Field& phi1, const ExponentBundle& bundle,
                         const SparseOperator& laplacian, const SparseOperator& biharmonic) {
  require_same_grid(u, phi1, "hardy_sobolev_ratio");
  if (u.max_abs() == 0) throw InvalidArgument("hardy_sobolev_ratio: zero field");
  Field quotient(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(phi1[k] > 0)) throw InvalidArgument("hardy_sobolev_ratio: phi1 must be positive on the grid");
    quotient[k] = u[k] / std::pow(phi1[k], bundle.weight_exponent);
  }
  return lp_norm(quotient, bundle.target_exponent) /
         w4s_norm(u, laplacian, biharmonic, bundle.source_exponent);
}

real hardy_sobolev_ratio(const Field& u, const Field& phi1, const ExponentBundle& bundle,
                         const Grid2D& grid) {
  if (!(u.grid() == grid)) throw InvalidArgument("hardy_sobolev_ratio: field lives on another grid");
  return hardy_sobolev_ratio(u, phi1, bundle, laplacian_matrix(grid), biharmonic_matrix(grid));
}

real nondegeneracy_radius(real lambda1_sq, real lambda2_sq, real p) {
  if (!(lambda1_sq > 0)) throw InvalidArgument("nondegeneracy_radius: lambda1^2 must be positive");
  if (!(lambda2_sq > lambda1_sq)) throw InvalidArgument("nondegeneracy_radius: need lambda2^2 > lambda1^2");
  if (!(p > 1)) throw InvalidArgument("nondegeneracy_radius: need p > 1");
  return std::pow((lambda2_sq - lambda1_sq) / p, 1 / (p - 1));
}

real sign_condition(const Field& f, const Field& phi1) { return integrate(f, phi1); }

}  // namespace biharm
