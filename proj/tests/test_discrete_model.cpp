#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dssf/discrete_model.hpp"

using namespace dssf;

namespace {

constexpr double kPi = std::numbers::pi;

// Level n >= 1 appears twice per sign, n = 0 once, plus one n = 0 copy from the
// truncated top level.
std::vector<double> level_oracle(double b0, double m, int L, int N, double X) {
  std::vector<double> out;
  for (int j = -N / 2; j < N / 2; ++j) {
    const double p = kPi * j / X;
    for (int n = 0; n < L; ++n) {
      const double e = std::sqrt(2.0 * b0 * n + p * p + m * m);
      const int mult = n == 0 ? 1 : 2;
      for (int c = 0; c < mult; ++c) out.insert(out.end(), {e, -e});
    }
    const double e0 = std::sqrt(p * p + m * m);
    out.insert(out.end(), {e0, -e0});
  }
  std::sort(out.begin(), out.end());
  return out;
}

double max_deviation(const Eigen::VectorXd& eig, const std::vector<double>& ref) {
  std::vector<double> e(eig.data(), eig.data() + eig.size());
  std::sort(e.begin(), e.end());
  REQUIRE(e.size() == ref.size());
  double d = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) d = std::max(d, std::abs(e[i] - ref[i]));
  return d;
}

}  // namespace

TEST_CASE("single level reduces to the 1-D Dirac fiber") {
  const auto h = build_h0(1.0, 0.7, 1, 8, 3.0);
  CHECK(h.dim() == 32);
  const auto eig = h0_eigenvalues(h);
  std::vector<double> ref;
  for (int j = -4; j < 4; ++j) {
    const double e = std::sqrt(std::pow(kPi * j / 3.0, 2) + 0.49);
    ref.insert(ref.end(), {e, e, -e, -e});
  }
  std::sort(ref.begin(), ref.end());
  CHECK(max_deviation(eig, ref) < 1e-12);
}

TEST_CASE("massless two-level model") {
  const auto h = build_h0(1.5, 0.0, 2, 8, 4.0);
  const auto eig = h0_eigenvalues(h);
  CHECK(max_deviation(eig, level_oracle(1.5, 0.0, 2, 8, 4.0)) < 1e-12);
  CHECK(fiber_deviation(h, eig) < 1e-12);
  CHECK(symmetry_defect(eig) < 1e-12);
}

TEST_CASE("gap, square identity and spectral symmetry") {
  for (double m : {1.0, 2.0}) {
    const auto h = build_h0(1.0, m, 4, 16, 10.0);
    CHECK((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    const auto eig = h0_eigenvalues(h);
    CHECK(check_gap(h, eig) == doctest::Approx(m).epsilon(1e-12));
    CHECK(max_deviation(eig, level_oracle(1.0, m, 4, 16, 10.0)) < 1e-11);
    const auto sq = check_square_identity(h);
    CHECK(sq.interior < 1e-12);
    CHECK(sq.top > 1.0);  // the top level is where truncation shows
    CHECK(symmetry_defect(eig) < 1e-11);
  }
}

TEST_CASE("build guards") {
  CHECK_THROWS_AS(build_h0(1.0, 1.0, 0, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_h0(1.0, 1.0, 2, 7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_h0(-1.0, 1.0, 2, 8, 1.0), std::invalid_argument);
}

TEST_CASE("divergent part counts like omega_+") {
  const auto U = RadialProfile::stretched_exponential(1.0, 1.0, 1.0);
  const PotentialSpec pot(alpha12_commutant(1.0, 1.0, 0.0), U,
                          LongitudinalProfile::gaussian(1.0 / std::sqrt(kPi), 1.0), 5.0);
  const auto model = toeplitz_radial_adaptive(U, FieldSpec::constant(2.0), 1e-7);
  for (int j : {6, 10}) {
    const auto c = tdiv_vs_omega_count(1.0 - std::pow(2.0, -j), 1.0, pot, model, Grid1D(8.0, 128), 1.0);
    CHECK(c.count_omega > 0);
    CHECK(std::abs(c.diff()) <= 1);
  }
  const auto none = tdiv_vs_omega_count(0.5, 1.0, pot, model, Grid1D(8.0, 128), 1e3);
  CHECK(none.count_tdiv == 0);
  CHECK(none.count_omega == 0);
}
