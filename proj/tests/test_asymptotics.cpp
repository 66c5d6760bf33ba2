#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dssf/asymptotics.hpp"

using namespace dssf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("power-law counting function") {
  const PowerLawAsymptotics law{3.0, 2.0 * kPi, 2.0};
  // s^{-2/3} * 2 / (4 pi) * 2 pi
  CHECK(psi(1e-3, law) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(psi(0.125, law) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(evaluate_law(0.125, law) == psi(0.125, law));
  CHECK_THROWS_AS(psi(0.0, law), std::domain_error);
}

TEST_CASE("exponential counting function branches") {
  const double s = 1e-6, L = 6.0 * std::log(10.0);
  CHECK(phi(s, {0.5, 2.0, 3.0}) == doctest::Approx(3.0 / (2.0 * 4.0) * L * L).epsilon(1e-12));
  CHECK(phi(s, {1.0, 2.0, 3.0}) == doctest::Approx(L / std::log(1.0 + 4.0 / 3.0)).epsilon(1e-12));
  CHECK(phi(s, {2.0, 2.0, 3.0}) == doctest::Approx(2.0 * L / std::log(L)).epsilon(1e-12));
  CHECK(phi_inf(s) == doctest::Approx(L / std::log(L)).epsilon(1e-12));
  CHECK(phi_inf(1e-300) > phi_inf(1e-30));
}

TEST_CASE("log laws reject s outside (0, 1/e)") {
  CHECK_THROWS_AS(phi_inf(0.5), std::domain_error);
  CHECK_THROWS_AS(phi(0.4, {1.0, 1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(phi_inf(-1e-3), std::domain_error);
  CHECK_NOTHROW(phi_inf(0.3));
}

TEST_CASE("law follows the profile class") {
  CHECK(std::holds_alternative<PowerLawAsymptotics>(law_for_profile(RadialProfile::power_law(1.0, 3.0), 1.0)));
  const auto e = law_for_profile(RadialProfile::stretched_exponential(2.0, 0.5, 1.5), 1.0);
  REQUIRE(std::holds_alternative<ExponentialAsymptotics>(e));
  CHECK(std::get<ExponentialAsymptotics>(e).beta == 1.5);
  CHECK(std::holds_alternative<CompactAsymptotics>(law_for_profile(RadialProfile::disc(1.0, 1.0), 1.0)));
}

TEST_CASE("level-set volume") {
  // {e^{-r^2} > s} is the disc of radius^2 |ln s|
  const auto g = levelset_count(RadialProfile::stretched_exponential(1.0, 1.0, 1.0), 1e-4, 2.0);
  CHECK(g.value == doctest::Approx(4.0 * std::log(10.0)).epsilon(1e-12));
  CHECK(levelset_count(RadialProfile::disc(1.0, 1.0), 2.0, 1.0).value == 0.0);
  // grid counting of a disc of radius 2: (b0/2pi) pi R^2 = 2 b0
  const auto d = levelset_count([](double x, double y) { return x * x + y * y < 4.0 ? 1.0 : 0.0; }, 0.5, 1.0,
                                3.0, 600);
  CHECK(std::abs(d.value - 2.0) <= d.error);
  CHECK(d.error < 0.05);
  CHECK_THROWS_AS(levelset_count([](double, double) { return 1.0; }, 0.5, 1.0, 3.0, 20), std::domain_error);
}

TEST_CASE("law comparison converges for a power law") {
  const auto prof = RadialProfile::power_law(1.0, 3.0);
  const auto model = toeplitz_radial_adaptive(prof, FieldSpec::constant(1.0), 1e-5);
  const auto c = compare_law(model, law_for_profile(prof, 1.0), {1e-3, 1e-4, 1e-5});
  REQUIRE(c.rows.size() == 3);
  CHECK(std::abs(c.rows.back().ratio - 1.0) < std::abs(c.rows.front().ratio - 1.0) + 0.02);
  CHECK(std::abs(c.rows.back().ratio - 1.0) < 0.1);
}
