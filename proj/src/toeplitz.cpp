#include "dssf/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dssf/quadrature.hpp"

namespace dssf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double PowerLaw::angular_integral() const { return kTwoPi * std::pow(u, 2.0 / alpha); }

RadialProfile::RadialProfile(std::string name, Fn eval, Fn log_eval, std::optional<DecayLaw> law,
                             double sup, std::optional<double> support_radius)
    : name_(std::move(name)), eval_(std::move(eval)), log_eval_(std::move(log_eval)),
      law_(std::move(law)), sup_(sup), support_(support_radius) {
  if (!eval_) throw std::invalid_argument("RadialProfile: missing evaluator");
  if (!(sup_ >= 0.0) || !std::isfinite(sup_))
    throw std::invalid_argument("RadialProfile: sup must be finite and nonnegative");
  if (support_ && !(*support_ > 0.0))
    throw std::invalid_argument("RadialProfile: support radius must be positive");
  if (law_) {
    if (const auto* p = std::get_if<PowerLaw>(&*law_)) {
      if (!(p->alpha > 0.0) || !(p->u > 0.0))
        throw std::invalid_argument("RadialProfile: power law needs alpha > 0 and u > 0");
    } else if (const auto* e = std::get_if<Exponential>(&*law_)) {
      if (!(e->eta > 0.0) || !(e->beta > 0.0))
        throw std::invalid_argument("RadialProfile: exponential law needs eta > 0 and beta > 0");
    } else if (const auto* c = std::get_if<CompactSupport>(&*law_)) {
      if (!(c->R > 0.0) || !(c->c > 0.0))
        throw std::invalid_argument("RadialProfile: compact support needs R > 0 and c > 0");
    }
  }
}

double RadialProfile::log_eval(double r) const {
  if (log_eval_) return log_eval_(r);
  const double v = eval_(r);
  return v > 0.0 ? std::log(v) : -kInf;
}

RadialProfile RadialProfile::stretched_exponential(double amplitude, double eta, double beta) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("stretched_exponential: amplitude must be positive");
  std::ostringstream name;
  name << "exponential(A=" << amplitude << ",eta=" << eta << ",beta=" << beta << ")";
  const double la = std::log(amplitude);
  return RadialProfile(
      name.str(), [=](double r) { return amplitude * std::exp(-eta * std::pow(r * r, beta)); },
      [=](double r) { return la - eta * std::pow(r * r, beta); }, Exponential{eta, beta}, amplitude);
}

RadialProfile RadialProfile::power_law(double amplitude, double alpha) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("power_law: amplitude must be positive");
  std::ostringstream name;
  name << "power(A=" << amplitude << ",alpha=" << alpha << ")";
  const double la = std::log(amplitude);
  return RadialProfile(
      name.str(), [=](double r) { return amplitude * std::pow(1.0 + r * r, -0.5 * alpha); },
      [=](double r) { return la - 0.5 * alpha * std::log1p(r * r); }, PowerLaw{alpha, amplitude},
      amplitude);
}

RadialProfile RadialProfile::disc(double radius, double c) {
  std::ostringstream name;
  name << "disc(R=" << radius << ",c=" << c << ")";
  const double lc = std::log(c);
  return RadialProfile(
      name.str(), [=](double r) { return r < radius ? c : 0.0; },
      [=](double r) { return r < radius ? lc : -kInf; }, CompactSupport{radius, c}, c, radius);
}

RadialProfile RadialProfile::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("constant profile must be nonnegative");
  std::ostringstream name;
  name << "constant(" << c << ")";
  const double lc = c > 0.0 ? std::log(c) : -kInf;
  return RadialProfile(name.str(), [=](double) { return c; }, [=](double) { return lc; },
                       std::nullopt, c);
}

RadialProfile RadialProfile::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("RadialProfile::scaled: bad factor");
  std::optional<DecayLaw> law = law_;
  if (c == 0.0) {
    return RadialProfile("0*" + name_, [](double) { return 0.0; }, [](double) { return -kInf; },
                         std::nullopt, 0.0, support_);
  }
  if (law) {
    if (auto* p = std::get_if<PowerLaw>(&*law)) p->u *= c;
    if (auto* cs = std::get_if<CompactSupport>(&*law)) cs->c *= c;
  }
  const double lc = std::log(c);
  RadialProfile self = *this;
  std::ostringstream name;
  name << c << "*" << name_;
  return RadialProfile(
      name.str(), [self, c](double r) { return c * self(r); },
      [self, lc](double r) { return lc + self.log_eval(r); }, law, c * sup_, support_);
}

void RadialProfile::check_classification() const {
  for (int i = 0; i <= 500; ++i) {
    const double r = 0.1 * i;
    const double v = eval_(r);
    if (!(v >= 0.0) || v > sup_ * (1.0 + 1e-12) + 1e-300)
      throw std::invalid_argument("RadialProfile " + name_ + ": value outside [0, sup] at r=" +
                                  std::to_string(r));
  }
  if (!law_) return;
  const double radii[3] = {10.0, 20.0, 40.0};
  if (const auto* p = std::get_if<PowerLaw>(&*law_)) {
    for (double r : radii) {
      const double model = std::log(p->u) - p->alpha * std::log(r);
      const double tol = (r == 40.0 ? 0.05 : 0.25) * std::max(1.0, p->alpha);
      if (std::abs(log_eval(r) - model) > tol)
        throw std::invalid_argument("RadialProfile " + name_ +
                                    ": tail inconsistent with power-law classification");
    }
  } else if (const auto* e = std::get_if<Exponential>(&*law_)) {
    for (double r : radii) {
      const double model = -e->eta * std::pow(r, 2.0 * e->beta);
      const double tol = r == 40.0 ? 0.25 : 0.5;
      if (!(std::abs(log_eval(r) / model - 1.0) <= tol))
        throw std::invalid_argument("RadialProfile " + name_ +
                                    ": tail inconsistent with exponential classification");
    }
  } else if (const auto* c = std::get_if<CompactSupport>(&*law_)) {
    for (double r : radii)
      if (r > c->R && eval_(r) != 0.0)
        throw std::invalid_argument("RadialProfile " + name_ + ": nonzero beyond support radius");
    if (sup_ < c->c) throw std::invalid_argument("RadialProfile " + name_ + ": sup below c");
  }
}

void ToeplitzModel::require_adequate(double s) const {
  if (!adequate_for(s)) {
    std::ostringstream msg;
    msg << "Toeplitz truncation K=" << K() << " inadequate at threshold " << s
        << ": last eigenvalue exp(" << spectrum.log_truncation_floor() << ") is not below s*1e-3";
    throw TruncationError(msg.str());
  }
}

double log_radial_toeplitz_entry(const RadialProfile& profile, const FieldSpec& field, int k,
                                 double log_norm) {
  if (profile.is_zero()) return -kInf;
  double hi = 0.0;
  {
    LLLBasis probe;
    probe.field = field;
    hi = probe.search_radius(k);
  }
  if (profile.support_radius()) hi = std::min(hi, *profile.support_radius());
  const double p = 2.0 * k + 1.0;
  auto log_f = [&](double r) {
    if (r <= 0.0) return -kInf;
    return profile.log_eval(r) + p * std::log(r) - 2.0 * field.phi(r);
  };
  const LogIntegral li = log_integrate_peaked(log_f, 0.0, hi);
  return li.log_value - 2.0 * log_norm;
}

namespace {

void fill_spectrum(ToeplitzModel& m) {
  std::vector<int> signs(m.log_eigenvalues.size());
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = std::isfinite(m.log_eigenvalues[i]) ? 1 : 0;
  m.spectrum = LogSpectrum::from_logs(m.log_eigenvalues, signs);
  m.spectrum.set_log_truncation_floor(m.log_eigenvalues.empty() ? -kInf : m.log_eigenvalues.back());
}

}  // namespace

ToeplitzModel toeplitz_radial_spectrum(const RadialProfile& profile, const LLLBasis& basis) {
  ToeplitzModel m;
  m.basis = basis;
  m.profile_name = profile.name();
  m.b0 = basis.field.b0();
  m.osc = basis.field.osc();
  m.log_eigenvalues.assign(basis.K, -kInf);
  parallel_for(static_cast<std::size_t>(basis.K), [&](std::size_t k) {
    m.log_eigenvalues[k] =
        log_radial_toeplitz_entry(profile, basis.field, static_cast<int>(k), basis.log_norms[k]);
  });
  fill_spectrum(m);
  return m;
}

namespace {

// First guess for K such that eigenvalue_K is about exp(log_target).
int predicted_truncation(const RadialProfile& profile, double b0, double log_target) {
  const auto& law = profile.law();
  const double lsup = std::log(std::max(profile.sup(), 1e-300));
  double k = 64.0;
  if (law) {
    if (const auto* p = std::get_if<PowerLaw>(&*law)) {
      k = 0.5 * b0 * std::exp((2.0 / p->alpha) * (std::log(p->u) - log_target));
    } else if (const auto* e = std::get_if<Exponential>(&*law)) {
      const double depth = std::max(1.0, lsup - log_target);
      k = 0.5 * b0 * std::pow(depth / e->eta, 1.0 / e->beta) + 8.0;
    } else if (const auto* c = std::get_if<CompactSupport>(&*law)) {
      // c x^{k+1} e^{-x} / (k+1)! with x = b0 R^2 / 2.
      const double x = 0.5 * b0 * c->R * c->R;
      double kk = 1.0;
      while (std::log(c->c) + (kk + 1) * std::log(x) - x - std::lgamma(kk + 2.0) > log_target) kk += 1.0;
      k = kk + 2.0;
    }
  }
  return static_cast<int>(std::clamp(k, 16.0, 4.0e6));
}

}  // namespace

ToeplitzModel toeplitz_radial_adaptive(const RadialProfile& profile, const FieldSpec& field,
                                       double s_min, int k_max) {
  if (!(s_min > 0.0)) throw std::invalid_argument("toeplitz_radial_adaptive: s_min must be positive");
  const double log_target = std::log(s_min) + std::log(1e-3);
  ToeplitzModel m;
  m.profile_name = profile.name();
  m.b0 = field.b0();
  m.osc = field.osc();
  m.basis.field = field;
  m.basis.K = 0;

  int K = std::min(k_max, predicted_truncation(profile, field.b0(), log_target));
  for (;;) {
    const int K0 = m.basis.K;
    m.basis.log_norms.resize(K);
    m.basis.radius_max.resize(K);
    m.log_eigenvalues.resize(K);
    parallel_for(static_cast<std::size_t>(K - K0), [&](std::size_t i) {
      const int k = K0 + static_cast<int>(i);
      double hi = 0.0;
      m.basis.log_norms[k] = 0.5 * log_lll_moment(field, k, &hi);
      m.basis.radius_max[k] = hi;
      m.log_eigenvalues[k] = log_radial_toeplitz_entry(profile, field, k, m.basis.log_norms[k]);
    });
    m.basis.K = K;
    if (m.log_eigenvalues.back() < log_target || profile.is_zero()) break;
    if (K >= k_max) {
      std::ostringstream msg;
      msg << "toeplitz_radial_adaptive: K_max=" << k_max << " reached before eigenvalues fell below "
          << s_min << "*1e-3";
      throw TruncationError(msg.str());
    }
    K = std::min(k_max, K + K / 2 + 16);
  }
  fill_spectrum(m);
  return m;
}

ToeplitzModel toeplitz_general_matrix(const PlanarSymbol& u, const LLLBasis& basis, int angular_modes) {
  const int K = basis.K;
  const int M = angular_modes;
  if (M < 2 * K)
    throw std::invalid_argument("toeplitz_general_matrix: angular modes must be at least 2K");
  const FieldSpec& field = basis.field;
  std::vector<double> theta(M);
  for (int m = 0; m < M; ++m) theta[m] = kTwoPi * m / M;

  // twiddle[d][m] = e^{-i d theta_m} for d = 0..M-1 (negative d by periodicity).
  std::vector<std::vector<cplx>> twiddle(M, std::vector<cplx>(M));
  for (int d = 0; d < M; ++d)
    for (int m = 0; m < M; ++m) twiddle[d][m] = std::polar(1.0, -kTwoPi * ((d * m) % M) / M);

  // Angular Fourier coefficients hat U_d(r) = int U(r, th) e^{-i d th} dth.
  auto coefficients = [&](double r, int dmax, std::vector<cplx>& out) {
    std::vector<double> samples(M);
    for (int m = 0; m < M; ++m) samples[m] = u(r, theta[m]);
    out.assign(2 * dmax + 1, cplx(0.0));
    for (int d = -dmax; d <= dmax; ++d) {
      const auto& tw = twiddle[((d % M) + M) % M];
      cplx acc = 0.0;
      for (int m = 0; m < M; ++m) acc += samples[m] * tw[m];
      out[d + dmax] = acc * (kTwoPi / M);
    }
  };

  // Aliasing guard: coefficients in the upper half of the resolvable band
  // must be negligible at representative radii.
  {
    const int dmax = M / 2 - 1;
    std::vector<cplx> c;
    for (int k : {0, K / 2, K - 1}) {
      const double r = std::sqrt((2.0 * k + 1.0) / field.b0());
      coefficients(r, dmax, c);
      const double lead = std::abs(c[dmax]);
      double tail = 0.0;
      for (int d = M / 4; d <= dmax; ++d)
        tail = std::max({tail, std::abs(c[d + dmax]), std::abs(c[-d + dmax])});
      if (tail > 1e-10 * std::max(lead, 1e-300) && tail > 0.0)
        throw std::invalid_argument("toeplitz_general_matrix: angular modes insufficient (Fourier tail " +
                                    std::to_string(tail / std::max(lead, 1e-300)) + " of leading term)");
    }
  }

  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K, K);
  const GaussRule& rule = gauss_legendre(16);
  // Entries sharing n = j + k share the radial weight r^{n+1} e^{-2 phi}.
  parallel_for(static_cast<std::size_t>(2 * K - 1), [&](std::size_t nn) {
    const int n = static_cast<int>(nn);
    auto log_w = [&](double r) {
      if (r <= 0.0) return -kInf;
      return (n + 1.0) * std::log(r) - 2.0 * field.phi(r);
    };
    LLLBasis probe;
    probe.field = field;
    const double hi = probe.search_radius((n + 1) / 2 + 1);
    const Window win = peaked_window(log_w, 0.0, hi);
    const int jlo = std::max(0, n - (K - 1)), jhi = std::min(n, K - 1);
    const int dmax = std::max(std::abs(jlo - (n - jlo)), std::abs(jhi - (n - jhi)));

    auto integrate = [&](int panels) {
      std::vector<cplx> acc(jhi - jlo + 1, cplx(0.0));
      std::vector<cplx> c;
      const double width = (win.b - win.a) / panels;
      for (int p = 0; p < panels; ++p) {
        const double mid = win.a + (p + 0.5) * width;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double r = mid + 0.5 * width * rule.nodes[q];
          const double lw = log_w(r);
          if (!std::isfinite(lw)) continue;
          coefficients(r, dmax, c);
          for (int j = jlo; j <= jhi; ++j) {
            const int k = n - j;
            const double scale =
                std::exp(lw - basis.log_norms[j] - basis.log_norms[k]) * 0.5 * width * rule.weights[q];
            acc[j - jlo] += scale * c[(j - k) + dmax] / kTwoPi;
          }
        }
      }
      return acc;
    };
    int panels = 8;
    std::vector<cplx> prev = integrate(panels);
    for (int it = 0;; ++it) {
      panels *= 2;
      std::vector<cplx> cur = integrate(panels);
      double change = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i) change = std::max(change, std::abs(cur[i] - prev[i]));
      prev = std::move(cur);
      if (change <= 1e-12 * std::max(1.0, std::abs(prev[0]))) break;
      if (it >= 6) throw ConvergenceError("toeplitz_general_matrix: radial quadrature did not stabilise");
    }
    for (int j = jlo; j <= jhi; ++j) T(j, n - j) = prev[j - jlo];
  });
  T = 0.5 * (T + T.adjoint()).eval();

  ToeplitzModel m;
  m.basis = basis;
  m.profile_name = "general";
  m.b0 = field.b0();
  m.osc = field.osc();
  m.matrix = T;
  const Eigen::VectorXd ev = hermitian_eigenvalues(T);
  const double top = ev.size() ? std::max(1.0, ev.cwiseAbs().maxCoeff()) : 1.0;
  std::vector<double> vals(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-14 * top)
      throw NumericalError("toeplitz_general_matrix: negative eigenvalue " + std::to_string(ev[i]) +
                           " signals a quadrature error");
    vals[ev.size() - 1 - i] = std::max(ev[i], 0.0);
  }
  for (double v : vals) m.log_eigenvalues.push_back(v > 0.0 ? std::log(v) : -kInf);
  std::vector<int> signs(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) signs[i] = vals[i] > 0.0 ? 1 : 0;
  m.spectrum = LogSpectrum::from_logs(m.log_eigenvalues, signs);
  const double last_diag = K > 0 ? std::abs(T(K - 1, K - 1)) : 0.0;
  m.spectrum.set_log_truncation_floor(last_diag > 0.0 ? std::log(last_diag) : -kInf);
  return m;
}

double planar_integral_power(const RadialProfile& profile, int q) {
  if (q < 1) throw std::invalid_argument("planar_integral_power: q must be >= 1");
  if (profile.is_zero()) return 0.0;
  const auto& law = profile.law();
  if (!law)
    throw std::invalid_argument("planar_integral_power: U^q integrability unknown without a decay law");
  if (const auto* p = std::get_if<PowerLaw>(&*law)) {
    if (!(q * p->alpha > 2.0))
      throw std::invalid_argument("planar_integral_power: U^q is not integrable (q*alpha <= 2)");
  }
  auto f = [&](double r) {
    const double lv = profile.log_eval(r);
    return std::isfinite(lv) ? std::exp(q * lv) * r : 0.0;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0;
  double value = 0.0;
  if (profile.support_radius()) {
    value = GK::integrate(f, 0.0, *profile.support_radius(), 15, 1e-13, &err);
  } else {
    value = GK::integrate(f, 0.0, kInf, 15, 1e-13, &err);
  }
  return kTwoPi * value;
}

RaikovCheck check_raikov_bound(const ToeplitzModel& model, const RadialProfile& profile, int q) {
  if (q < 1) throw std::invalid_argument("check_raikov_bound: q must be >= 1");
  RaikovCheck c;
  const double lhs_log = model.spectrum.log_schatten_power(q);
  c.lhs = std::isfinite(lhs_log) ? std::exp(lhs_log) : 0.0;
  c.rhs = model.b0 / kTwoPi * std::exp(2.0 * model.osc) * planar_integral_power(profile, q);
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-10);
  return c;
}

CsvTable toeplitz_spectrum_table(const ToeplitzModel& model) {
  CsvTable t;
  t.header = {"k", "log10_eigenvalue"};
  for (std::size_t k = 0; k < model.log_eigenvalues.size(); ++k)
    t.add({static_cast<long long>(k), model.log_eigenvalues[k] / std::log(10.0)});
  return t;
}

}  // namespace dssf
