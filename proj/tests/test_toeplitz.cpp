#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "dssf/toeplitz.hpp"

using namespace dssf;

TEST_CASE("gaussian symbol gives a geometric spectrum") {
  // int e^{-r^2} r^{2k+1} e^{-b0 r^2/2} / int r^{2k+1} e^{-b0 r^2/2} = (b0/(2+b0))^{k+1}
  for (double b0 : {2.0, 0.5}) {
    const auto basis = build_lll_basis(FieldSpec::constant(b0), 60);
    const auto m = toeplitz_radial_spectrum(RadialProfile::stretched_exponential(1.0, 1.0, 1.0), basis);
    for (int k = 0; k < 60; ++k) {
      const double oracle = (k + 1) * std::log(b0 / (2.0 + b0));
      CHECK(m.log_eigenvalues[k] == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("disc symbol matches the regularized incomplete gamma") {
  const auto basis = build_lll_basis(FieldSpec::constant(2.0), 100);
  const auto m = toeplitz_radial_spectrum(RadialProfile::disc(1.0, 1.0), basis);
  for (int k = 0; k < 100; ++k) {
    const double oracle = std::log(boost::math::gamma_p(k + 1.0, 1.0));
    CHECK(m.log_eigenvalues[k] == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("general path against Gaussian moments") {
  const double b0 = 2.0, c = 0.5;
  const int K = 20;
  const auto basis = build_lll_basis(FieldSpec::constant(b0), K);
  const auto m = toeplitz_general_matrix(
      [c](double r, double th) { return std::exp(-r * r) * (1.0 + c * std::cos(th)); }, basis, 64);
  const double a = 1.0 + 0.5 * b0, h = 0.5 * b0;
  double worst = 0.0;
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      double oracle = 0.0;
      if (j == k) oracle = std::pow(h / a, k + 1);
      if (j == k + 1 || k == j + 1) {
        const int lo = std::min(j, k);
        oracle = 0.5 * c *
                 std::exp(std::lgamma(lo + 1.5) - 0.5 * (std::lgamma(lo + 1.0) + std::lgamma(lo + 2.0)) +
                          (lo + 1.5) * std::log(h / a));
      }
      worst = std::max(worst, std::abs(m.matrix(j, k) - cplx(oracle)));
    }
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(toeplitz_general_matrix([](double, double) { return 1.0; }, basis, 10), std::invalid_argument);
}

TEST_CASE("trace bound holds") {
  const auto field = FieldSpec::constant(1.5);
  const auto prof = RadialProfile::power_law(2.0, 3.0);
  const auto m = toeplitz_radial_adaptive(prof, field, 1e-3);
  for (int q : {1, 2, 3}) CHECK(check_raikov_bound(m, prof, q).holds);
  // exact for q = 1 in the limit K -> inf: Tr pUp = (b0/2pi) int U
  const auto g = toeplitz_radial_adaptive(RadialProfile::stretched_exponential(1.0, 1.0, 1.0), field, 1e-14);
  const auto r = check_raikov_bound(g, RadialProfile::stretched_exponential(1.0, 1.0, 1.0), 1);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
  CHECK(planar_integral_power(RadialProfile::stretched_exponential(1.0, 1.0, 1.0), 2) ==
        doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
}

TEST_CASE("adaptive truncation reaches the requested floor") {
  const auto field = FieldSpec::constant(2.0);
  const auto m = toeplitz_radial_adaptive(RadialProfile::stretched_exponential(1.0, 1.0, 1.0), field, 1e-30);
  CHECK(m.adequate_for(1e-30));
  CHECK(m.log_eigenvalues.back() < std::log(1e-33));
  CHECK_THROWS_AS(toeplitz_radial_adaptive(RadialProfile::power_law(1.0, 3.0), field, 1e-12, 50), TruncationError);
}

TEST_CASE("classification guard") {
  auto bad = RadialProfile("bad", [](double r) { return std::exp(-r); }, {}, DecayLaw{PowerLaw{3.0, 1.0}}, 1.0);
  CHECK_THROWS_AS(bad.check_classification(), std::invalid_argument);
  CHECK_NOTHROW(RadialProfile::power_law(1.0, 3.0).check_classification());
}
