#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "dssf/csv.hpp"
#include "dssf/toeplitz.hpp"

namespace dssf {

struct PowerLawAsymptotics {
  double alpha = 3.0;
  double angular_integral = 2.0 * 3.14159265358979323846;  // int_{S^1} u^{2/alpha}
  double b0 = 1.0;
};
struct ExponentialAsymptotics {
  double beta = 1.0;
  double eta = 1.0;
  double b0 = 1.0;
};
struct CompactAsymptotics {};

using AsymptoticLaw = std::variant<PowerLawAsymptotics, ExponentialAsymptotics, CompactAsymptotics>;

// s^{-2/alpha} (b0 / 4 pi) int u^{2/alpha}
double psi(double s, const PowerLawAsymptotics& law);
// Three branches in beta; s must lie in (0, 1/e).
double phi(double s, const ExponentialAsymptotics& law);
// |ln s| / ln|ln s|, s in (0, 1/e).
double phi_inf(double s);
double evaluate_law(double s, const AsymptoticLaw& law);

// Law matching the decay class of a radial profile on a field of strength b0.
AsymptoticLaw law_for_profile(const RadialProfile& profile, double b0);

struct LevelSetCount {
  double value = 0.0;
  double error = 0.0;
};
// (b0 / 2 pi) |{U > s}| for a non-increasing radial profile (root finding).
LevelSetCount levelset_count(const RadialProfile& profile, double s, double b0);
// General planar symbol by grid counting on [-L, L]^2 with n x n cells.
LevelSetCount levelset_count(const std::function<double(double, double)>& u, double s, double b0,
                             double half_width, int n);

struct LawRatioRow {
  double s = 0.0;
  long long n_plus = 0;
  double law_value = 0.0;
  double ratio = 0.0;
  double staircase_halfwidth = 0.0;  // 1 / law(s)
};
struct LawComparison {
  std::vector<LawRatioRow> rows;
  // Least-squares slope of (ratio - 1) against 1 / law(s); small when the
  // counts approach the law at the staircase rate.
  double slope = 0.0;
};
LawComparison compare_law(const ToeplitzModel& model, const AsymptoticLaw& law,
                          const std::vector<double>& s_values);

CsvTable law_comparison_table(const LawComparison& c);

}  // namespace dssf
