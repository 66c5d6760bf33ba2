#include "dssf/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dssf {

namespace {

constexpr double kPi = std::numbers::pi;

void require_log_domain(double s, const char* who) {
  if (!(s > 0.0) || !(s < std::exp(-1.0)))
    throw std::domain_error(std::string(who) + ": s must lie in (0, 1/e)");
}

}  // namespace

double psi(double s, const PowerLawAsymptotics& law) {
  if (!(s > 0.0)) throw std::domain_error("psi: s must be positive");
  if (!(law.alpha > 0.0) || !(law.b0 > 0.0) || !(law.angular_integral > 0.0))
    throw std::invalid_argument("psi: law parameters must be positive");
  return std::pow(s, -2.0 / law.alpha) * law.b0 / (4.0 * kPi) * law.angular_integral;
}

double phi(double s, const ExponentialAsymptotics& law) {
  require_log_domain(s, "phi");
  if (!(law.beta > 0.0) || !(law.eta > 0.0) || !(law.b0 > 0.0))
    throw std::invalid_argument("phi: law parameters must be positive");
  const double L = std::abs(std::log(s));
  if (law.beta < 1.0) return law.b0 / (2.0 * std::pow(law.eta, 1.0 / law.beta)) * std::pow(L, 1.0 / law.beta);
  if (law.beta == 1.0) return L / std::log1p(2.0 * law.eta / law.b0);
  return law.beta / (law.beta - 1.0) * L / std::log(L);
}

double phi_inf(double s) {
  require_log_domain(s, "phi_inf");
  const double L = std::abs(std::log(s));
  return L / std::log(L);
}

double evaluate_law(double s, const AsymptoticLaw& law) {
  if (const auto* p = std::get_if<PowerLawAsymptotics>(&law)) return psi(s, *p);
  if (const auto* e = std::get_if<ExponentialAsymptotics>(&law)) return phi(s, *e);
  return phi_inf(s);
}

AsymptoticLaw law_for_profile(const RadialProfile& profile, double b0) {
  const auto& law = profile.law();
  if (!law) throw std::invalid_argument("law_for_profile: profile " + profile.name() + " has no decay law");
  if (const auto* p = std::get_if<PowerLaw>(&*law)) return PowerLawAsymptotics{p->alpha, p->angular_integral(), b0};
  if (const auto* e = std::get_if<Exponential>(&*law)) return ExponentialAsymptotics{e->beta, e->eta, b0};
  return CompactAsymptotics{};
}

LevelSetCount levelset_count(const RadialProfile& profile, double s, double b0) {
  if (!(s > 0.0)) throw std::invalid_argument("levelset_count: s must be positive");
  LevelSetCount out;
  if (profile(0.0) <= s && profile.sup() <= s) return out;
  // Largest radius with U > s; the profile is taken to be non-increasing.
  double lo = 0.0, hi = 1.0;
  if (profile(lo) <= s) return out;
  while (profile(hi) > s) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("levelset_count: level set {U > s} is unbounded");
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (profile(mid) > s) lo = mid;
    else hi = mid;
  }
  const double r = 0.5 * (lo + hi);
  out.value = 0.5 * b0 * r * r;
  out.error = b0 * r * (hi - lo);
  return out;
}

LevelSetCount levelset_count(const std::function<double(double, double)>& u, double s, double b0,
                             double half_width, int n) {
  if (!(s > 0.0)) throw std::invalid_argument("levelset_count: s must be positive");
  if (n < 2) throw std::invalid_argument("levelset_count: grid too small");
  const double h = 2.0 * half_width / n;
  std::vector<char> in(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      in[static_cast<std::size_t>(i) * n + j] = u(-half_width + (i + 0.5) * h, -half_width + (j + 0.5) * h) > s;
  long long count = 0, boundary = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool c = in[static_cast<std::size_t>(i) * n + j];
      count += c;
      bool edge = false;
      if (i > 0 && in[static_cast<std::size_t>(i - 1) * n + j] != c) edge = true;
      if (i + 1 < n && in[static_cast<std::size_t>(i + 1) * n + j] != c) edge = true;
      if (j > 0 && in[static_cast<std::size_t>(i) * n + j - 1] != c) edge = true;
      if (j + 1 < n && in[static_cast<std::size_t>(i) * n + j + 1] != c) edge = true;
      if (c && (i == 0 || j == 0 || i == n - 1 || j == n - 1))
        throw std::domain_error("levelset_count: level set reaches the sampling box");
      boundary += edge;
    }
  }
  const double factor = b0 / (2.0 * kPi) * h * h;
  return {factor * static_cast<double>(count), factor * static_cast<double>(boundary)};
}

LawComparison compare_law(const ToeplitzModel& model, const AsymptoticLaw& law,
                          const std::vector<double>& s_values) {
  if (s_values.empty()) return {};
  const double smin = *std::min_element(s_values.begin(), s_values.end());
  model.require_adequate(smin);
  LawComparison c;
  double sxy = 0.0, sxx = 0.0;
  for (double s : s_values) {
    LawRatioRow r;
    r.s = s;
    r.n_plus = static_cast<long long>(model.spectrum.n_plus(s));
    r.law_value = evaluate_law(s, law);
    r.ratio = static_cast<double>(r.n_plus) / r.law_value;
    r.staircase_halfwidth = 1.0 / r.law_value;
    sxy += r.staircase_halfwidth * (r.ratio - 1.0);
    sxx += r.staircase_halfwidth * r.staircase_halfwidth;
    c.rows.push_back(r);
  }
  c.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return c;
}

CsvTable law_comparison_table(const LawComparison& c) {
  CsvTable t;
  t.header = {"s", "n_plus", "law_value", "ratio", "staircase_halfwidth"};
  for (const auto& r : c.rows) t.add({r.s, r.n_plus, r.law_value, r.ratio, r.staircase_halfwidth});
  return t;
}

}  // namespace dssf
