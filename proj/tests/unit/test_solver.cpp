#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "biharm/solver.hpp"

using namespace biharm;

namespace {

constexpr real kP = 2.1L;
constexpr real kR = 2.5L;

std::shared_ptr<const Discretization> coarse() {
  static const auto disc = discretize(build_grid(1, 1, 31, 31));
  return disc;
}

ProblemSpec power_spec(real c, std::shared_ptr<const Discretization> disc = coarse()) {
  Field f = positive_part_power(disc->phi1, kP);
  f *= -c;
  return ProblemSpec::create(disc, 6, kP, kR, std::move(f));
}

}  // namespace

TEST_CASE("residual of exact and trivial states") {
  const ProblemSpec spec = power_spec(1);
  CHECK(residual(spec.phi1(), spec).max_abs() < 1e-8L);
  const Field at_zero = residual(Field(spec.grid()), spec);
  CHECK((at_zero + spec.forcing()).max_abs() == 0);

  const real t = 0.3L;
  const ReferenceForcing ref = reference_forcing(t, spec.phi1(), kP, kR);
  const ProblemSpec known = spec.with_forcing(ref.forcing);
  CHECK(residual(t * spec.phi1(), known).max_abs() < 1e-8L);
}

TEST_CASE("fixed point map") {
  const ProblemSpec spec = power_spec(1);
  const real t = 0.3L;
  const ProblemSpec known = spec.with_forcing(reference_forcing(t, spec.phi1(), kP, kR).forcing);
  const Field u = t * spec.phi1();
  CHECK((fixed_point_map(u, known) - u).max_abs() < 1e-8L);

  const ProblemSpec unforced = spec.with_forcing(Field(spec.grid()), SignCheck::skip);
  CHECK(fixed_point_map(Field(spec.grid()), unforced).max_abs() == 0);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Field v = oracle::random_smooth(spec.grid(), seed);
    const Field lhs = spec.disc().biharmonic.apply(fixed_point_map(v, spec) - v);
    const Field rhs = residual(v, spec);
    CHECK((lhs + rhs).max_abs() <= 1e-8L * std::max<real>(1, rhs.max_abs()));
  }
}

TEST_CASE("linearization structure") {
  const ProblemSpec spec = power_spec(1);
  Field negative = oracle::random_smooth(spec.grid(), 4);
  for (real& v : negative.values()) v = -std::fabs(v);
  const SparseOperator lin = linearization(negative, spec);
  CHECK(lin.is_exactly_symmetric());
  const auto& b = spec.disc().biharmonic;
  for (std::size_t i = 0; i < spec.grid().size(); ++i) {
    CHECK(lin.entry(i, i) == b.entry(i, i) - spec.lambda1_sq());
    if (i + 1 < spec.grid().size()) CHECK(lin.entry(i, i + 1) == b.entry(i, i + 1));
  }

  const real radius = nondegeneracy_radius(spec.lambda1_sq(), spec.lambda2_sq(), kP);
  const Field u = 0.9L * radius / spec.phi1().max_abs() * spec.phi1();
  CHECK(u.max_abs() < radius);
  const Field g = linearization_weight(u, spec);
  for (real v : g.values()) {
    CHECK(v >= spec.lambda1_sq());
    CHECK(v < spec.lambda2_sq());
  }
}

TEST_CASE("linearization matches finite differences away from the kink") {
  const ProblemSpec spec = power_spec(0.05L);
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const Field u = oracle::random_smooth(spec.grid(), seed, 0.1L);
    const Field w = oracle::random_smooth(spec.grid(), seed + 100);
    const Field jw = linearization(u, spec).apply(w);
    for (real eps : {1e-4L, 1e-5L}) {
      Field fd = residual(u + eps * w, spec) - residual(u, spec);
      fd *= 1 / eps;
      real err = 0, ref = 0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (std::fabs(u[k]) <= 1e-3L) continue;
        err += (fd[k] - jw[k]) * (fd[k] - jw[k]);
        ref += jw[k] * jw[k];
      }
      CHECK(std::sqrt(err / ref) < 1e-3L);
    }
  }
}

TEST_CASE("newton solve") {
  const ProblemSpec spec = power_spec(1);
  const Solution sol = newton_solve(0.9L * spec.phi1(), spec, 1e-9L, 10);
  CHECK(sol.residual_norm < 1e-9L);
  CHECK(sol.newton_iterations <= 10);
  CHECK((sol.u - spec.phi1()).max_abs() < 1e-8L);

  const Solution again = newton_solve(sol.u, spec, 1e-9L, 10);
  CHECK(again.newton_iterations == 0);

  CHECK_THROWS_AS(newton_solve(spec.phi1(), spec, 0, 10), InvalidArgument);
  CHECK_THROWS_AS(newton_solve(0.2L * spec.phi1(), spec, 1e-14L, 1), NewtonFailure);
  // At u = 0 the Jacobian is B - lambda1^2 I, singular along phi1.
  CHECK_THROWS_AS(newton_solve(Field(spec.grid()), spec, 1e-10L, 10), DegenerateLinearization);
}

TEST_CASE("reference forcing") {
  const Field& phi = coarse()->phi1;
  const ReferenceForcing zero = reference_forcing(0, phi, kP, kR);
  CHECK(zero.forcing.max_abs() == 0);
  CHECK(zero.lr_norm == 0);

  const real t = 0.7L;
  const real base = lp_norm(positive_part_power(phi, kP), kR);
  CHECK(std::fabs(reference_forcing(t, phi, kP, kR).lr_norm - std::pow(t, kP) * base) < 1e-15L * base);

  const real eps = 0.01L;
  const real t_max = std::pow(eps / base, 1 / kP);
  CHECK(reference_forcing(0.99L * t_max, phi, kP, kR).lr_norm < eps);
  CHECK_THROWS_AS(reference_forcing(-1, phi, kP, kR), InvalidArgument);
}

TEST_CASE("homotopy reaches the analytic endpoint") {
  const real c = 0.05L, t_ref = 0.3L;
  const ProblemSpec spec = power_spec(c);
  const auto [sol, trace] = homotopy_path(spec, t_ref, 10, 1e-11L);
  CHECK(trace.status == ContinuationStatus::success);
  CHECK(trace.records.front().tau == 1);
  CHECK(trace.records.back().tau == 0);
  for (std::size_t i = 1; i < trace.records.size(); ++i) CHECK(trace.records[i].tau < trace.records[i - 1].tau);
  for (const auto& rec : trace.records) {
    CHECK(rec.residual < 1e-11L);
    const real amp = oracle::homotopy_amplitude(c, t_ref, kP, rec.tau);
    CHECK(std::fabs(rec.t_component - amp) < 1e-9L);
  }
  CHECK(sol.residual_norm < 1e-8L);
  CHECK(resonance_identity_residual(sol.u, spec) < 1e-7L);
  CHECK((sol.u - oracle::homotopy_amplitude(c, t_ref, kP, 0) * spec.phi1()).max_abs() < 1e-9L);
  REQUIRE(sol.index_certificate.has_value());
  CHECK(sol.index_certificate->mu1 < 1);
  CHECK(sol.index_certificate->mu2 > 1);
  CHECK(sol.index_certificate->index == 1);
  CHECK(sol.index_certificate->nondegenerate);
}

TEST_CASE("homotopy with target equal to the reference is constant") {
  const real t_ref = 0.4L;
  const ProblemSpec spec = power_spec(std::pow(t_ref, kP));
  const auto [sol, trace] = homotopy_path(spec, t_ref, 4, 1e-11L);
  for (const auto& rec : trace.records) CHECK(std::fabs(rec.t_component - t_ref) < 1e-10L);
  CHECK((sol.u - t_ref * spec.phi1()).max_abs() < 1e-9L);
  CHECK_THROWS_AS(homotopy_path(spec, t_ref, 0, 1e-10L), InvalidArgument);
  CHECK_THROWS_AS(homotopy_path(spec, 0, 4, 1e-10L), InvalidArgument);
}

TEST_CASE("homotopy failure carries the partial trace") {
  // An absolute tolerance below the round-off floor of a huge solution.
  const ProblemSpec spec = power_spec(1e10L);
  try {
    (void)homotopy_path(spec, 0.3L, 4, 1e-12L);
    FAIL("expected a continuation failure");
  } catch (const ContinuationFailure& e) {
    CHECK(e.trace().status != ContinuationStatus::success);
    CHECK(e.trace().status != ContinuationStatus::running);
    CHECK_FALSE(e.trace().records.empty());
    CHECK(e.tau() < 1);
    REQUIRE(e.trace().failed_tau.has_value());
    CHECK(*e.trace().failed_tau == e.tau());
    CHECK(*e.trace().failed_tau < e.trace().records.back().tau);
    for (std::size_t i = 1; i < e.trace().records.size(); ++i)
      CHECK(e.trace().records[i].tau < e.trace().records[i - 1].tau);
  }
}

TEST_CASE("index certificate controls") {
  const ProblemSpec spec = power_spec(1);
  const IndexCertificate at_zero = linearization_index(Field(spec.grid()), spec);
  CHECK(std::fabs(at_zero.mu1 - 1) < 1e-8L);
  CHECK_FALSE(at_zero.nondegenerate);

  const IndexCertificate second = index_from_weight(Field::constant(spec.grid(), spec.lambda2_sq()), spec);
  CHECK(std::fabs(second.mu2 - 1) < 1e-8L);
  CHECK_FALSE(second.nondegenerate);
}

TEST_CASE("trace and meta serialization") {
  ContinuationTrace trace;
  trace.records.push_back({1, 0, 2, 1e-12L, 0.5L, 0.3L});
  trace.status = ContinuationStatus::step_underflow;
  std::ostringstream os;
  write_trace_csv(os, trace);
  CHECK(os.str().rfind("tau,step,newton_iters,residual,sup_norm,t_component\n1,0,2,", 0) == 0);
  CHECK(os.str().find("# status=step_underflow") != std::string::npos);

  const ProblemSpec spec = power_spec(1);
  Solution sol = newton_solve(spec.phi1(), spec, 1e-9L, 5);
  sol.index_certificate = linearization_index(sol.u, spec);
  std::ostringstream meta;
  write_solution_meta(meta, sol);
  CHECK(meta.str().find("index=1\n") != std::string::npos);
  CHECK(meta.str().find("mu1=") != std::string::npos);
}
