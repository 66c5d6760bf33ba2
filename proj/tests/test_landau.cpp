#include <doctest.h>

#include <cmath>

#include "dssf/landau.hpp"

using namespace dssf;

TEST_CASE("constant-field norms match Gaussian moments") {
  for (double b0 : {0.5, 1.0, 2.0, 7.0}) {
    const auto basis = build_lll_basis(FieldSpec::constant(b0), 300);
    for (int k : {0, 1, 10, 150, 299}) {
      // int r^{2k+1} e^{-b0 r^2 / 2} dr = k! / (2 (b0/2)^{k+1})
      const double oracle = 0.5 * (std::lgamma(k + 1.0) - std::log(2.0) - (k + 1) * std::log(b0 / 2.0));
      CHECK(basis.log_norms[k] == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(constant_field_log_norm(b0, k) == doctest::Approx(oracle).epsilon(1e-13));
    }
  }
}

TEST_CASE("perturbed field changes the norms within the oscillation bound") {
  const FieldSpec f(1.0, [](double r) { return 0.3 * std::exp(-r * r); }, "bump");
  CHECK(f.osc() == doctest::Approx(0.3).epsilon(1e-3));
  CHECK_FALSE(f.is_constant_field());
  for (int k : {0, 3, 20}) {
    const double lm = log_lll_moment(f, k);
    const double l0 = 2.0 * constant_field_log_norm(1.0, k);
    CHECK(lm <= l0 + 1e-12);
    CHECK(lm >= l0 - 2.0 * f.osc() - 1e-12);
  }
}

TEST_CASE("unbounded perturbation is rejected") {
  CHECK_THROWS_AS(FieldSpec(1.0, [](double r) { return r; }, "linear"), std::invalid_argument);
  CHECK_THROWS_AS(FieldSpec::constant(-1.0), std::invalid_argument);
}

TEST_CASE("ladder identities on the truncation") {
  const double b0 = 1.5;
  const auto l = build_ladder(b0, 10);
  for (int k = 0; k < 10; ++k) CHECK(l.h_minus(k, k) == doctest::Approx(2.0 * b0 * k));
  for (int k = 0; k < 9; ++k) CHECK(l.h_plus(k, k) == doctest::Approx(2.0 * b0 * (k + 1)));
  CHECK(l.h_plus(9, 9) == 0.0);  // truncation artefact on the top level
  const auto c = l.canonical_commutator();
  for (int k = 0; k < 9; ++k) CHECK(c(k, k) == doctest::Approx(2.0 * b0));
  // The lowest level is the kernel of a*.
  CHECK(l.a_dag.col(0).norm() == 0.0);
  CHECK((l.a_dag - l.a.transpose()).norm() == 0.0);
}

TEST_CASE("zeta is 2 b0 for a constant field") {
  CHECK(compute_zeta(FieldSpec::constant(3.0)) == doctest::Approx(6.0));
}
