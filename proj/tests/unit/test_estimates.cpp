#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "biharm/estimates.hpp"

using namespace biharm;

TEST_CASE("hypothesis window") {
  const HypothesisReport six = check_hypotheses(6, 2.1L, 2.5L);
  CHECK(six.all_pass());
  CHECK(six.p_lower == 2);
  CHECK(std::fabs(six.p_upper - 7.0L / 3) < 1e-18L);
  CHECK(six.r_min == 2);

  const HypothesisReport eight = check_hypotheses(8, 1.5L, 3);
  CHECK(eight.p_lower == 1);
  CHECK(std::fabs(eight.p_upper - 1.8L) < 1e-18L);

  CHECK_FALSE(check_hypotheses(5, 2.1L, 2.5L).dimension_ok);
  const HypothesisReport edge = check_hypotheses(6, 2.1L, 2);
  CHECK_FALSE(edge.r_ok);
  CHECK(edge.failures().find("r") != std::string::npos);
  CHECK_FALSE(check_hypotheses(6, 2, 2.5L).p_ok);
  CHECK_FALSE(check_hypotheses(6, 7.0L / 3, 2.5L).p_ok);
  CHECK(six.failures().empty());
}

TEST_CASE("exponent bundle spot value") {
  const ExponentBundle b = exponent_bundle(6, 2.1L);
  CHECK(static_cast<double>(b.source_exponent) == doctest::Approx(1.476190).epsilon(1e-6));
  CHECK(static_cast<double>(b.sobolev_gap) == doctest::Approx(0.010753).epsilon(1e-4));
  CHECK(std::fabs(b.holder_split - 0.844923L) < 1e-5L);
  CHECK(std::fabs(b.weight_exponent - 0.637363L) < 1e-5L);
  // The reported t = 8.548496 sits 1.1e-5 away from the value implied by the
  // other two relations; compare relatively.
  CHECK(std::fabs(b.target_exponent - 8.548496L) < 1e-5L * 8.548496L);
  CHECK(std::fabs(b.young_exponent - 1.113551L) < 1e-5L);

  const oracle::Exponents ref = oracle::exponents_by_bisection(6, 2.1L);
  CHECK(std::fabs(b.holder_split - ref.alpha) < 1e-15L);
  CHECK(std::fabs(b.weight_exponent - ref.tau) < 1e-15L);
  CHECK(std::fabs(b.target_exponent - ref.t) < 1e-13L);
  CHECK(std::fabs(b.young_exponent - ref.theta) < 1e-15L);
  CHECK(std::fabs(b.weight_exponent * b.target_exponent - b.holder_split / (1 - b.holder_split)) < 1e-12L);
}

TEST_CASE("exponent bundle over all windows") {
  for (int n = 6; n <= 12; ++n) {
    const HypothesisReport w = check_hypotheses(n, 0, 0);
    for (int i = 1; i <= 20; ++i) {
      const real p = w.p_lower + (w.p_upper - w.p_lower) * i / 21;
      const ExponentBundle b = exponent_bundle(n, p);
      CHECK(b.holder_split > 0);
      CHECK(b.holder_split < 1);
      CHECK(b.weight_exponent >= 0);
      CHECK(b.weight_exponent <= 1);
      CHECK(b.young_exponent > 1);
      CHECK(std::fabs(1 / b.target_exponent - (1 / b.source_exponent - (4 - b.weight_exponent) / n)) < 1e-12L);
      const oracle::Exponents ref = oracle::exponents_by_bisection(n, p);
      CHECK(std::fabs(b.holder_split - ref.alpha) < 1e-12L);
    }
  }
}

TEST_CASE("exponent bundle rejects out-of-window input") {
  CHECK_THROWS_AS(exponent_bundle(6, 2.5L), InvalidArgument);
  CHECK_THROWS_AS(exponent_bundle(5, 2.1L), InvalidArgument);
  CHECK_THROWS_AS(exponent_bundle(6, 2), InvalidArgument);
}

TEST_CASE("hypotheses csv") {
  std::ostringstream os;
  write_hypotheses_csv_header(os);
  write_hypotheses_csv_row(os, check_hypotheses(6, 2.1L, 2.5L));
  write_hypotheses_csv_row(os, check_hypotheses(6, 2.4L, 2.5L));
  const std::string s = os.str();
  CHECK(s.rfind("N,p,r,s,L,alpha,tau,t,theta,pass\n", 0) == 0);
  CHECK(s.find(",1\n") != std::string::npos);
  CHECK(s.find(",,,,,,0\n") != std::string::npos);
}

namespace {

struct Fixture {
  std::shared_ptr<const Discretization> disc = discretize(build_grid(1, 1, 31, 31));
  const Field& phi() const { return disc->phi1; }
};

}  // namespace

TEST_CASE("discretization data") {
  const Fixture fx;
  const auto ref = oracle::stencil_spectrum(fx.disc->grid, 2);
  CHECK(std::fabs(fx.disc->lambda1 - ref[0]) <= 1e-12L * ref[0]);
  CHECK(std::fabs(fx.disc->lambda2_sq - ref[1] * ref[1]) <= 1e-10L * ref[1] * ref[1]);
  for (real v : fx.phi().values()) CHECK(v > 0);
  CHECK(std::fabs(integrate(fx.phi(), fx.phi()) - 1) < 1e-15L);
}

TEST_CASE("decompose") {
  const Fixture fx;
  const Decomposition three = decompose(3 * fx.phi(), fx.phi());
  CHECK(std::fabs(three.amplitude - 3) < 1e-15L);
  CHECK(three.u1.max_abs() < 1e-15L);

  Field w = oracle::random_smooth(fx.disc->grid, 8);
  w.add_scaled(-integrate(w, fx.phi()), fx.phi());
  const Decomposition split = decompose(fx.phi() + w, fx.phi());
  CHECK(std::fabs(split.amplitude - 1) < 1e-15L);
  CHECK((split.u1 - w).max_abs() < 1e-15L);

  const Field u = oracle::random_smooth(fx.disc->grid, 9, 0.3L);
  const Decomposition d = decompose(u, fx.phi());
  CHECK((d.amplitude * fx.phi() + d.u1 - u).max_abs() < 1e-12L);
  CHECK(std::fabs(integrate(d.u1, fx.phi())) < 1e-12L);
}

TEST_CASE("resonance identity residual") {
  const Fixture fx;
  const real p = 2.1L;
  const Field f = -1 * positive_part_power(fx.phi(), p);
  const ProblemSpec spec = ProblemSpec::create(fx.disc, 6, p, 2.5L, f);
  CHECK(resonance_identity_residual(fx.phi(), spec) < 1e-15L);

  const Field zero(fx.disc->grid);
  CHECK(std::fabs(resonance_identity_residual(zero, spec) - std::fabs(integrate(f, fx.phi()))) < 1e-18L);

  const ProblemSpec doubled = spec.with_forcing(2 * f);
  const real expected = integrate(positive_part_power(fx.phi(), p), fx.phi());
  CHECK(expected > 0);
  CHECK(std::fabs(resonance_identity_residual(fx.phi(), doubled) - expected) < 1e-15L);
}

TEST_CASE("problem spec gates hypotheses") {
  const Fixture fx;
  const Field f = -1 * fx.phi();
  CHECK_THROWS_AS(ProblemSpec::create(fx.disc, 6, 2.1L, 2.5L, fx.phi()), HypothesisViolation);
  CHECK_THROWS_AS(ProblemSpec::create(fx.disc, 5, 2.1L, 2.5L, f), HypothesisViolation);
  CHECK_THROWS_AS(ProblemSpec::create(fx.disc, 6, 2.5L, 2.5L, f), HypothesisViolation);
  CHECK_THROWS_AS(ProblemSpec::create(fx.disc, 6, 2.1L, 2, f), HypothesisViolation);
  CHECK_NOTHROW(ProblemSpec::create(fx.disc, 6, 2.1L, 2.5L, fx.phi(), SignCheck::skip));
}

TEST_CASE("sign condition") {
  const Fixture fx;
  CHECK(std::fabs(sign_condition(-1 * fx.phi(), fx.phi()) + 1) < 1e-15L);
  CHECK(std::fabs(sign_condition(fx.phi(), fx.phi()) - 1) < 1e-15L);
  const real p = 2.1L;
  const Field f = -1 * positive_part_power(0.1L * fx.phi(), p);
  const real expected = -std::pow(0.1L, p) * integrate(positive_part_power(fx.phi(), p), fx.phi());
  CHECK(expected < 0);
  CHECK(std::fabs(sign_condition(f, fx.phi()) - expected) < 1e-15L);
}

TEST_CASE("nondegeneracy radius") {
  const real pi4 = std::pow(oracle::kPi, 4);
  const real r = nondegeneracy_radius(4 * pi4, 25 * pi4, 2);
  CHECK(std::fabs(r - 21 * pi4 / 2) < 1e-12L);
  CHECK(static_cast<double>(r) == doctest::Approx(1022.8).epsilon(1e-4));
  CHECK_THROWS_AS(nondegeneracy_radius(10, 10, 2), InvalidArgument);
  const real p = 2.1L;
  const real base = nondegeneracy_radius(100, 300, p);
  const real wide = nondegeneracy_radius(100, 500, p);
  CHECK(std::fabs(wide / base - std::pow(2.0L, 1 / (p - 1))) < 1e-15L);
}

TEST_CASE("hardy-sobolev ratio") {
  const Fixture fx;
  const ExponentBundle b = exponent_bundle(6, 2.1L);
  const real base = hardy_sobolev_ratio(fx.phi(), fx.phi(), b, fx.disc->laplacian, fx.disc->biharmonic);
  CHECK(std::isfinite(base));
  CHECK(base > 0);
  const real scaled = hardy_sobolev_ratio(-4.5L * fx.phi(), fx.phi(), b, fx.disc->grid);
  CHECK(std::fabs(scaled / base - 1) < 1e-13L);

  const auto fine = discretize(build_grid(1, 1, 63, 63));
  const real refined = hardy_sobolev_ratio(fine->phi1, fine->phi1, b, fine->laplacian, fine->biharmonic);
  CHECK(refined / base < 2);
  CHECK(base / refined < 2);

  ExponentBundle flat = b;
  flat.weight_exponent = 0;
  const Field u = oracle::random_smooth(fx.disc->grid, 12);
  const real direct = lp_norm(u, b.target_exponent) /
                      w4s_norm(u, fx.disc->laplacian, fx.disc->biharmonic, b.source_exponent);
  CHECK(std::fabs(hardy_sobolev_ratio(u, fx.phi(), flat, fx.disc->grid) / direct - 1) < 1e-14L);

  CHECK_THROWS_AS(hardy_sobolev_ratio(Field(fx.disc->grid), fx.phi(), b, fx.disc->grid), InvalidArgument);
}
