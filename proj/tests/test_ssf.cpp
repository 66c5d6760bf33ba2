#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "dssf/ssf.hpp"

using namespace dssf;

namespace {

constexpr double kPi = std::numbers::pi;

// V = diag(2, 1/2, 1/2, 2) pattern, U = e^{-r^2}, int g = 1, b0 = 2:
// pW_+p has eigenvalues 2^{-k}, pW_-p has 2^{-(k+2)}.
struct Setup {
  PotentialSpec pot{alpha12_commutant(2.0, 0.5, 0.0), RadialProfile::stretched_exponential(1.0, 1.0, 1.0),
                    LongitudinalProfile::gaussian(1.0 / std::sqrt(kPi), 1.0), 5.0};
  ToeplitzModel model = toeplitz_radial_adaptive(RadialProfile::stretched_exponential(1.0, 1.0, 1.0),
                                                 FieldSpec::constant(2.0), 1e-12);
  WSpectra w = make_w_spectra(pot, model);
};

double count_above(double s, double scale) {
  int n = 0;
  for (int k = 0; k < 200; ++k) n += scale * std::pow(0.5, k) > s;
  return n;
}

double arctan_sum(double c, double lambda, double m) {
  const double a = std::sqrt((lambda + m) / (lambda - m));
  double acc = 0.0;
  for (int k = 0; k < 200; ++k)
    acc += std::atan(c * 0.5 * a * std::pow(0.5, k)) + std::atan(c * 0.5 / a * std::pow(0.5, k + 2));
  return acc;
}

}  // namespace

TEST_CASE("inside-gap brackets count below-threshold eigenvalues") {
  Setup s;
  REQUIRE(s.w.trace_plus.has_value());
  CHECK(*s.w.trace_plus == doctest::Approx(2.0).epsilon(1e-12));
  const double m = 1.0, eps = 0.1;
  for (double l : {0.9, 0.999, 0.999999}) {
    const double f = 2.0 * std::sqrt((m - l) / (m + l));
    const auto b = xi_inside_bracket(l, m, eps, s.w, Pair::HMinus);
    CHECK(b.lower == -count_above((1 - eps) * f, 1.0));
    CHECK(b.upper == -count_above((1 + eps) * f, 1.0));
    CHECK(b.lower <= b.upper);
    const auto c = xi_inside_bracket(-l, m, eps, s.w, Pair::HPlus);
    CHECK(c.lower == count_above((1 + eps) * f, 0.25));
    CHECK(c.upper == count_above((1 - eps) * f, 0.25));
    CHECK(xi_inside_bracket(l, m, eps, s.w, Pair::HPlus).bounded);
  }
  CHECK_THROWS_AS(xi_inside_bracket(1.5, m, eps, s.w, Pair::HMinus), std::invalid_argument);
}

TEST_CASE("outside brackets are arctan traces") {
  Setup s;
  const double m = 1.0, eps = 0.1;
  for (double l : {1.1, 1.001}) {
    const auto b = xi_outside_bracket(l, m, eps, OmegaSource{&s.w, nullptr}, Pair::HMinus);
    CHECK(b.lower == doctest::Approx(-arctan_sum(1.0 / (1.0 - eps), l, m) / kPi).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(-arctan_sum(1.0 / (1.0 + eps), l, m) / kPi).epsilon(1e-12));
    const auto t = trace_arctan_omega1(l, m, 0.3, s.w);
    // the truncated sum misses terms below 1e-15
    CHECK(t.path_direct == doctest::Approx(arctan_sum(1.0 / 0.3, l, m)).epsilon(1e-12));
    CHECK(std::abs(t.path_direct - t.path_staircase) < 1e-10);
  }
}

TEST_CASE("tail correction restores the exact trace of a truncated spectrum") {
  const auto spec = LogSpectrum::from_values({1.0, 0.5});
  CHECK(trace_arctan(spec, 0.0, 0.25) == doctest::Approx(std::atan(1.0) + std::atan(0.5) + 0.25).epsilon(1e-15));
  CHECK(trace_arctan(spec, std::log(2.0)) == doctest::Approx(std::atan(2.0) + std::atan(1.0)).epsilon(1e-15));
}

TEST_CASE("leading-order predictions and their signs") {
  const AsymptoticLaw law = ExponentialAsymptotics{1.0, 1.0, 2.0};
  const double m = 1.0;
  auto phi1 = [](double s) { return std::abs(std::log(s)) / std::log(2.0); };
  CHECK(predict_xi(law, 0.99, m, Pair::HMinus) == doctest::Approx(-phi1(2.0 * std::sqrt(0.01 / 1.99))));
  CHECK(predict_xi(law, -0.99, m, Pair::HPlus) == doctest::Approx(phi1(2.0 * std::sqrt(0.01 / 1.99))));
  CHECK(predict_xi(law, 1.01, m, Pair::HMinus) == doctest::Approx(-0.5 * phi1(2.0 * std::sqrt(0.01 / 2.01))));
  CHECK(predict_xi(law, -1.01, m, Pair::HPlus) == doctest::Approx(0.5 * phi1(2.0 * std::sqrt(0.01 / 2.01))));
  CHECK_THROWS_AS(predict_xi(law, 0.99, m, Pair::HPlus), std::invalid_argument);
  CHECK_THROWS_AS(predict_xi(law, -1.01, m, Pair::HMinus), std::invalid_argument);
  CHECK(outside_prefactor(PowerLawAsymptotics{4.0, 2.0 * kPi, 1.0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("full Omega approaches the first-order model at threshold") {
  Setup s;
  const double m = 1.0, l = 1.0 + 1e-7;
  const auto full = build_omega_full(l, m, s.pot, s.model, Grid1D(12.0, 4001));
  const auto first = build_omega1(l, m, s.w);
  const auto a = full.spectrum.values(), b = first.values();
  REQUIRE(a.size() >= 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5));
  CHECK(full.moments(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(build_omega_full(0.5, m, s.pot, s.model, Grid1D(12.0, 101)), std::invalid_argument);
}

TEST_CASE("assembled O_+ matches omega_+") {
  const PotentialSpec pot(alpha12_commutant(1.0, 0.7, cplx(0.2, 0.1)), RadialProfile::stretched_exponential(1.0, 1.0, 1.0),
                          LongitudinalProfile::gaussian(1.0, 1.0), 5.0);
  const auto model = toeplitz_radial_spectrum(RadialProfile::stretched_exponential(1.0, 1.0, 1.0),
                                              build_lll_basis(FieldSpec::constant(2.0), 4));
  for (double l : {0.0, 0.5, -0.9}) {
    const auto c = spec_ab_check(l, 1.0, pot, model, Grid1D(6.0, 16));
    CHECK(c.dimension == 256);
    CHECK(c.max_rel_diff < 1e-12);
  }
  CHECK_THROWS_AS(spec_ab_check(0.5, 1.0, pot, model, Grid1D(6.0, 512)), std::invalid_argument);
}

TEST_CASE("potential guards name the violated condition") {
  auto make = [](double nu, double alpha) {
    return PotentialSpec(alpha12_commutant(1.0, 1.0, 0.0), RadialProfile::power_law(1.0, alpha),
                         LongitudinalProfile::power(1.0, 6.0), nu);
  };
  CHECK_NOTHROW(make(5.0, 4.0));
  try {
    make(2.5, 4.0);
    FAIL("accepted nu = 2.5");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("nu > 3") != std::string::npos);
  }
  CHECK_THROWS_AS(make(5.0, 3.5), std::invalid_argument);
  CHECK_THROWS_AS(make(7.0, 6.0), std::invalid_argument);  // longitudinal decay 6 < 7
}
