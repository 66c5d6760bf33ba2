#include <doctest.h>

#include <random>

#include "dssf/dirac_algebra.hpp"

using namespace dssf;

namespace {

Matrix4c random_hermitian(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix4c a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double re = n(rng);
      a(i, j) = cplx(re, n(rng));
    }
  return 0.5 * (a + a.adjoint());
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("anticommutation relations hold exactly") {
  const auto d = dirac_matrices();
  CHECK(anticommutation_residual(d) <= 1e-12);
  // Pauli block structure of alpha_2 in the standard representation.
  CHECK(d.alpha2(0, 3) == cplx(0, -1));
  CHECK(d.alpha2(1, 2) == cplx(0, 1));
  CHECK(d.beta(2, 2) == cplx(-1, 0));
}

TEST_CASE("hermitian matrix guard") {
  Matrix4c m = Matrix4c::Zero();
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianMatrix4{m}, std::invalid_argument);
  m(1, 0) = 1.0;
  CHECK_NOTHROW(HermitianMatrix4{m});
}

TEST_CASE("psd square root squares back") {
  const auto v = alpha12_commutant(3.0, 2.0, cplx(0.5, 0.7));
  REQUIRE(v.is_psd());
  const Matrix4c r = v.sqrt_psd();
  CHECK(max_abs(r * r - v.matrix()) <= 1e-12);
  CHECK(max_abs(r - r.adjoint()) <= 1e-12);
}

TEST_CASE("commutant pattern commutes with alpha1 and alpha2") {
  const auto d = dirac_matrices();
  const auto v = alpha12_commutant(1.5, -0.25, cplx(0.3, -0.9));
  CHECK(max_abs(v.matrix() * d.alpha1 - d.alpha1 * v.matrix()) <= 1e-12);
  CHECK(max_abs(v.matrix() * d.alpha2 - d.alpha2 * v.matrix()) <= 1e-12);
  const auto c = validate_alpha12_commutant(v);
  CHECK(c.valid);
  CHECK(c.pattern_residual <= 1e-12);

  Matrix4c bad = v.matrix();
  bad(0, 1) = 0.2;
  bad(1, 0) = 0.2;
  const auto cb = validate_alpha12_commutant(HermitianMatrix4(bad));
  CHECK_FALSE(cb.valid);
  CHECK(cb.commutator_residual > 0.1);
}

TEST_CASE("charge conjugation permutes entries as displayed") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix4c v = random_hermitian(rng);
    const Matrix4c w = charge_conjugate_potential(HermitianMatrix4(v)).matrix();
    // Expected matrix written out entry by entry (1-based names in comments).
    auto V = [&](int i, int j) { return v(i - 1, j - 1); };
    Matrix4c e;
    e << V(4, 4), -std::conj(V(4, 3)), -std::conj(V(4, 2)), std::conj(V(4, 1)),
        -std::conj(V(3, 4)), V(3, 3), std::conj(V(3, 2)), -std::conj(V(3, 1)),
        -std::conj(V(2, 4)), std::conj(V(2, 3)), V(2, 2), -std::conj(V(2, 1)),
        std::conj(V(1, 4)), -std::conj(V(1, 3)), -std::conj(V(1, 2)), V(1, 1);
    CHECK(max_abs(w - e) <= 1e-12);
  }
}

TEST_CASE("charge conjugation of a diagonal potential reverses the diagonal") {
  Matrix4c v = Matrix4c::Zero();
  v.diagonal() << 1.0, 2.0, 3.0, 4.0;
  const Matrix4c w = charge_conjugate_potential(HermitianMatrix4(v)).matrix();
  CHECK(w(0, 0).real() == doctest::Approx(4.0));
  CHECK(w(1, 1).real() == doctest::Approx(3.0));
  CHECK(w(2, 2).real() == doctest::Approx(2.0));
  CHECK(w(3, 3).real() == doctest::Approx(1.0));
}

TEST_CASE("U_C is unitary and the conjugation preserves the spectrum") {
  const Matrix4c u = charge_conjugation_matrix();
  CHECK(max_abs(u * u.adjoint() - Matrix4c::Identity()) <= 1e-14);
  std::mt19937_64 rng(11);
  const HermitianMatrix4 v(random_hermitian(rng));
  const auto e1 = v.eigenvalues();
  const auto e2 = charge_conjugate_potential(v).eigenvalues();
  CHECK((e1 - e2).cwiseAbs().maxCoeff() <= 1e-12);
}
