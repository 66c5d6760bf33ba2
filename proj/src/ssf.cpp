#include "dssf/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dssf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

// Trapezoid weights of a uniform grid.
double trapezoid_weight(const Grid1D& g, long long i) {
  return (i == 0 || i == g.N - 1) ? 0.5 * g.h() : g.h();
}

double retained_sum(const LogSpectrum& s) {
  double acc = 0.0;
  for (const auto& e : s.entries())
    if (e.sign > 0) acc += std::exp(e.log_abs);
  return acc;
}

// sum over i of i * (atan tau_i - atan tau_{i+1}) for tau sorted descending:
// the Cauchy integral of t -> #{tau_j > t} over t > 0.
double staircase_arctan(std::vector<double> log_tau) {
  std::sort(log_tau.begin(), log_tau.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_tau.size(); ++i) {
    const double hi = std::atan(std::exp(log_tau[i]));
    const double lo = i + 1 < log_tau.size() ? std::atan(std::exp(log_tau[i + 1])) : 0.0;
    acc += static_cast<double>(i + 1) * (hi - lo);
  }
  return acc;
}

void require_outside(double lambda, double m, const char* who) {
  if (!(m > 0.0)) throw std::invalid_argument(std::string(who) + ": m must be positive");
  if (!(std::abs(lambda) > m)) throw std::invalid_argument(std::string(who) + ": requires |lambda| > m");
}

void require_inside(double lambda, double m, const char* who) {
  if (!(m > 0.0)) throw std::invalid_argument(std::string(who) + ": m must be positive");
  if (!(std::abs(lambda) < m)) throw std::invalid_argument(std::string(who) + ": requires |lambda| < m");
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("bracket epsilon must lie in (0, 1)");
}

}  // namespace

LongitudinalProfile LongitudinalProfile::gaussian(double amplitude, double width) {
  if (!(amplitude >= 0.0) || !(width > 0.0))
    throw std::invalid_argument("gaussian: amplitude must be >= 0 and width > 0");
  LongitudinalProfile g;
  std::ostringstream n;
  n << "gaussian(" << amplitude << "," << width << ")";
  g.name = n.str();
  g.eval = [amplitude, width](double x) { return amplitude * std::exp(-(x / width) * (x / width)); };
  g.integral = amplitude * width * std::sqrt(kPi);
  g.decay = kInf;
  return g;
}

LongitudinalProfile LongitudinalProfile::power(double amplitude, double nu3) {
  if (!(amplitude >= 0.0) || !(nu3 > 1.0))
    throw std::invalid_argument("power: amplitude must be >= 0 and nu3 > 1");
  LongitudinalProfile g;
  std::ostringstream n;
  n << "power(" << amplitude << "," << nu3 << ")";
  g.name = n.str();
  g.eval = [amplitude, nu3](double x) { return amplitude * std::pow(japanese(x), -nu3); };
  g.integral = amplitude * weighted_mass(nu3);
  g.decay = nu3;
  return g;
}

PotentialSpec::PotentialSpec(HermitianMatrix4 matrix_part, RadialProfile transverse,
                             LongitudinalProfile longitudinal, double nu)
    : matrix_(std::move(matrix_part)),
      transverse_(std::move(transverse)),
      longitudinal_(std::move(longitudinal)),
      nu_(nu) {
  std::vector<std::string> errors;
  if (!(nu_ > 3.0)) errors.push_back("nu > 3 is required");
  if (!matrix_.is_psd()) errors.push_back("matrix part must be positive semidefinite");
  if (!longitudinal_.eval) errors.push_back("longitudinal profile is missing");
  else if (!(longitudinal_.integral >= 0.0) || !std::isfinite(longitudinal_.integral))
    errors.push_back("longitudinal profile must be nonnegative and integrable");
  if (!(transverse_.sup() >= 0.0) || !(transverse_(0.0) >= 0.0))
    errors.push_back("transverse profile must be nonnegative");
  if (const auto& law = transverse_.law())
    if (const auto* p = std::get_if<PowerLaw>(&*law); p && p->alpha < nu_ - 1.0)
      errors.push_back("transverse power decay must be at least r^{-(nu-1)}");
  if (longitudinal_.decay < nu_) errors.push_back("longitudinal decay is slower than <x>^{-nu}");
  if (!errors.empty()) {
    std::string msg = "PotentialSpec:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
}

double PotentialSpec::w_plus_factor() const { return matrix_(0, 0).real() * longitudinal_.integral; }
double PotentialSpec::w_minus_factor() const { return matrix_(2, 2).real() * longitudinal_.integral; }

WSpectra make_w_spectra(const PotentialSpec& p, const ToeplitzModel& model) {
  WSpectra w;
  const double fp = p.w_plus_factor(), fm = p.w_minus_factor();
  if (fp > 0.0) w.plus = model.spectrum.scaled(std::log(fp));
  if (fm > 0.0) w.minus = model.spectrum.scaled(std::log(fm));
  if (model.basis.field.is_constant_field() && model.matrix.size() == 0) {
    const double tr = model.b0 / (2.0 * kPi) * planar_integral_power(p.transverse(), 1);
    w.trace_plus = fp * tr;
    w.trace_minus = fm * tr;
  }
  return w;
}

const char* pair_name(Pair p) { return p == Pair::HPlus ? "H+" : "H-"; }

double omega_threshold(double lambda, double m, CountSign sign) {
  require_inside(lambda, m, "omega_threshold");
  return sign == CountSign::Plus ? 2.0 * std::sqrt((m - lambda) / (m + lambda))
                                 : 2.0 * std::sqrt((m + lambda) / (m - lambda));
}

BracketEstimate xi_inside_bracket(double lambda, double m, double eps, const WSpectra& w, Pair pair) {
  require_inside(lambda, m, "xi_inside_bracket");
  require_eps(eps);
  if (lambda == 0.0) throw std::invalid_argument("xi_inside_bracket: lambda = 0 approaches neither threshold");
  BracketEstimate b;
  b.epsilon = eps;
  const bool upper_edge = lambda > 0.0;
  // Near +m only xi(H-) carries the divergent count, near -m only xi(H+).
  if ((upper_edge && pair == Pair::HPlus) || (!upper_edge && pair == Pair::HMinus)) {
    b.bounded = true;
    return b;
  }
  const LogSpectrum& spec = upper_edge ? w.plus : w.minus;
  const double f = omega_threshold(lambda, m, upper_edge ? CountSign::Plus : CountSign::Minus);
  const double s_lo = (1.0 - eps) * f, s_hi = (1.0 + eps) * f;
  if (!spec.adequate_for(s_lo)) {
    std::ostringstream msg;
    msg << "xi_inside_bracket: truncation floor exp(" << spec.log_truncation_floor()
        << ") is not below 1e-3 of the threshold " << s_lo;
    throw TruncationError(msg.str());
  }
  const double n_lo = static_cast<double>(spec.n_plus(s_lo));
  const double n_hi = static_cast<double>(spec.n_plus(s_hi));
  b.threshold_low = s_lo;
  b.threshold_high = s_hi;
  b.near_threshold = spec.near_threshold(s_lo) + spec.near_threshold(s_hi);
  if (upper_edge) {
    b.lower = -n_lo;
    b.upper = -n_hi;
  } else {
    b.lower = n_hi;
    b.upper = n_lo;
  }
  return b;
}

LogSpectrum build_omega1(double lambda, double m, const WSpectra& w) {
  require_outside(lambda, m, "build_omega1");
  const double ap = std::abs(lambda + m), am = std::abs(lambda - m);
  const double lp = 0.5 * std::log(ap / am) - std::log(2.0);
  const double lm = 0.5 * std::log(am / ap) - std::log(2.0);
  LogSpectrum out = w.plus.empty() ? LogSpectrum() : w.plus.scaled(lp);
  if (!w.minus.empty()) out = out.merged(w.minus.scaled(lm));
  return out;
}

ArctanTrace trace_arctan_omega1(double lambda, double m, double s, const WSpectra& w) {
  if (!(s > 0.0)) throw std::invalid_argument("trace_arctan_omega1: s must be positive");
  ArctanTrace t;
  const LogSpectrum omega = build_omega1(lambda, m, w);
  t.path_direct = trace_arctan(omega, -std::log(s));

  // Staircase path: n_+(2 s t r; pW p) jumps at t = mu / (2 s r).
  const double ap = std::abs(lambda + m), am = std::abs(lambda - m);
  auto family = [&](const LogSpectrum& spec, double r) {
    std::vector<double> log_tau;
    for (const auto& e : spec.entries())
      if (e.sign > 0) log_tau.push_back(e.log_abs - std::log(2.0 * s * r));
    return staircase_arctan(std::move(log_tau));
  };
  t.path_staircase = family(w.plus, std::sqrt(am / ap)) + family(w.minus, std::sqrt(ap / am));

  const double diff = std::abs(t.path_direct - t.path_staircase);
  if (diff > 1e-10 * std::max(1.0, std::abs(t.path_direct))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "trace_arctan_omega1: direct " << t.path_direct << " vs staircase " << t.path_staircase;
    throw CrossCheckError(msg.str());
  }
  return t;
}

double OmegaModel::trace() const { return retained_sum(spectrum); }

OmegaModel build_omega_full(double lambda, double m, const PotentialSpec& p, const ToeplitzModel& model,
                            const Grid1D& grid) {
  require_outside(lambda, m, "build_omega_full");
  if (model.matrix.size() != 0)
    throw std::invalid_argument("build_omega_full: needs the radial Toeplitz model of the transverse profile");
  OmegaModel o;
  o.lambda = lambda;
  o.m = m;
  o.k_lambda = std::sqrt(lambda * lambda - m * m);
  o.log_prefactor = -std::log(2.0 * o.k_lambda);

  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  const auto& g = p.longitudinal();
  for (long long i = 0; i < grid.N; ++i) {
    const double x = grid.node(i);
    const double wg = trapezoid_weight(grid, i) * g.eval(x);
    const double c = std::cos(o.k_lambda * x), s = std::sin(o.k_lambda * x);
    c11 += wg * c * c;
    c12 += wg * s * c;
    c22 += wg * s * s;
  }
  o.moments << c11, c12, c12, c22;

  const auto& V = p.matrix_part();
  const double ap = std::abs(lambda + m), am = std::abs(lambda - m);
  o.a_tilde << ap * V(0, 0), o.k_lambda * V(0, 2), o.k_lambda * V(2, 0), am * V(2, 2);

  // Spinor part on C^4 (components 2 and 4 vanish) tensored with the moments.
  Eigen::Matrix4cd a4 = Eigen::Matrix4cd::Zero();
  a4(0, 0) = o.a_tilde(0, 0);
  a4(0, 2) = o.a_tilde(0, 1);
  a4(2, 0) = o.a_tilde(1, 0);
  a4(2, 2) = o.a_tilde(1, 1);
  o.kernel = Eigen::MatrixXcd::Zero(8, 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) o.kernel.block(4 * a, 4 * b, 4, 4) = o.moments(a, b) * a4;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(o.kernel, Eigen::EigenvaluesOnly);
  o.kernel_eigenvalues = es.eigenvalues();
  const double top = o.kernel_eigenvalues.cwiseAbs().maxCoeff();
  if (o.kernel_eigenvalues.minCoeff() < -1e-12 * std::max(top, 1e-300))
    throw CrossCheckError("build_omega_full: spinor kernel is not positive semidefinite");

  std::vector<double> logs;
  std::vector<int> signs;
  for (double lmu : model.log_eigenvalues) {
    if (!std::isfinite(lmu)) continue;
    for (int i = 0; i < 8; ++i) {
      const double e = o.kernel_eigenvalues(i);
      if (e <= 1e-14 * top) continue;
      logs.push_back(o.log_prefactor + lmu + std::log(e));
      signs.push_back(1);
    }
  }
  o.spectrum = LogSpectrum::from_logs(logs, signs);
  o.spectrum.set_log_truncation_floor(model.spectrum.log_truncation_floor() + o.log_prefactor + safe_log(top));
  if (model.basis.field.is_constant_field())
    o.trace_transverse = model.b0 / (2.0 * kPi) * planar_integral_power(p.transverse(), 1);

  // Tr Omega <= sqrt(|l+m|/|l-m|) ||pW+p||_1 + sqrt(|l-m|/|l+m|) ||pW-p||_1.
  const double tr_u = o.trace_transverse ? *o.trace_transverse : retained_sum(model.spectrum);
  const double tr_omega = std::exp(o.log_prefactor) * tr_u * o.kernel_eigenvalues.sum();
  const double bound = (std::sqrt(ap / am) * p.w_plus_factor() + std::sqrt(am / ap) * p.w_minus_factor()) * tr_u;
  if (tr_omega > bound * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "build_omega_full: trace " << tr_omega << " exceeds the trace-norm bound " << bound;
    throw CrossCheckError(msg.str());
  }
  return o;
}

double trace_arctan(const LogSpectrum& spec, double log_c, std::optional<double> tail_mass) {
  double acc = 0.0;
  for (const auto& e : spec.entries())
    if (e.sign != 0) acc += e.sign * std::atan(std::exp(e.log_abs + log_c));
  // Dropped eigenvalues are below 1e-3 of the scale, where arctan x = x to O(x^3).
  if (tail_mass && *tail_mass > 0.0) acc += *tail_mass * std::exp(log_c);
  return acc;
}

BracketEstimate xi_outside_bracket(double lambda, double m, double eps, const OmegaSource& omega, Pair pair) {
  require_outside(lambda, m, "xi_outside_bracket");
  require_eps(eps);
  LogSpectrum spec;
  std::optional<double> tail;
  if (omega.full) {
    const OmegaModel& o = *omega.full;
    if (o.lambda != lambda || o.m != m)
      throw std::invalid_argument("xi_outside_bracket: Omega model was built for a different lambda");
    spec = o.spectrum;
    if (o.trace_transverse)
      tail = std::exp(o.log_prefactor) * *o.trace_transverse * o.kernel_eigenvalues.sum() - o.trace();
  } else if (omega.w) {
    spec = build_omega1(lambda, m, *omega.w);
    if (omega.w->trace_plus && omega.w->trace_minus) {
      const double ap = std::abs(lambda + m), am = std::abs(lambda - m);
      tail = 0.5 * std::sqrt(ap / am) * *omega.w->trace_plus + 0.5 * std::sqrt(am / ap) * *omega.w->trace_minus -
             retained_sum(spec);
    }
  } else {
    throw std::invalid_argument("xi_outside_bracket: no Omega source");
  }
  if (!spec.adequate_for(1.0 - eps)) {
    std::ostringstream msg;
    msg << "xi_outside_bracket: truncation floor exp(" << spec.log_truncation_floor()
        << ") is not below 1e-3 of the arctan scale " << 1.0 - eps;
    throw TruncationError(msg.str());
  }
  const double t_small = trace_arctan(spec, -std::log1p(eps), tail) / kPi;   // (1+eps)^{-1} Omega
  const double t_large = trace_arctan(spec, -std::log1p(-eps), tail) / kPi;  // (1-eps)^{-1} Omega
  BracketEstimate b;
  b.epsilon = eps;
  b.threshold_low = 1.0 - eps;
  b.threshold_high = 1.0 + eps;
  if (pair == Pair::HMinus) {
    b.lower = -t_large;
    b.upper = -t_small;
  } else {
    b.lower = t_small;
    b.upper = t_large;
  }
  return b;
}

double outside_prefactor(const AsymptoticLaw& law) {
  if (const auto* p = std::get_if<PowerLawAsymptotics>(&law)) {
    if (!(p->alpha > 2.0)) throw std::domain_error("outside_prefactor: power law needs alpha > 2");
    return 1.0 / (2.0 * std::cos(kPi / p->alpha));
  }
  return 0.5;
}

double predict_xi(const AsymptoticLaw& law, double lambda, double m, Pair pair) {
  if (!(m > 0.0)) throw std::invalid_argument("predict_xi: m must be positive");
  const double a = std::abs(lambda);
  if (a == m || lambda == 0.0) throw std::invalid_argument("predict_xi: lambda must be off the thresholds and nonzero");
  const bool upper_edge = lambda > 0.0;
  if ((upper_edge && pair == Pair::HPlus) || (!upper_edge && pair == Pair::HMinus))
    throw std::invalid_argument(std::string("predict_xi: xi(") + pair_name(pair) +
                                ") stays bounded at this threshold");
  // Distance ratio to the approached threshold e = sign(lambda) m.
  const double arg = 2.0 * std::sqrt(std::abs(a - m) / (a + m));
  const double value = evaluate_law(arg, law);
  const double pref = a < m ? 1.0 : outside_prefactor(law);
  return (upper_edge ? -1.0 : 1.0) * pref * value;
}

std::vector<LevinsonRow> levinson_ratio(const AsymptoticLaw& law, Pair pair, const std::vector<double>& eps_sequence,
                                        double m, double bracket_eps, const WSpectra& w) {
  const double sgn = pair == Pair::HMinus ? 1.0 : -1.0;
  const double target = outside_prefactor(law);
  std::vector<LevinsonRow> rows;
  for (double e : eps_sequence) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("levinson_ratio: eps must lie in (0, 1)");
    LevinsonRow r;
    r.eps = e;
    r.lambda_inside = sgn * m * (1.0 - e);
    r.lambda_outside = sgn * m / (1.0 - e);
    r.inside = xi_inside_bracket(r.lambda_inside, m, bracket_eps, w, pair);
    r.outside = xi_outside_bracket(r.lambda_outside, m, bracket_eps, OmegaSource{&w, nullptr}, pair);
    r.ratio = r.outside.midpoint() / r.inside.midpoint();
    r.target = target;
    rows.push_back(r);
  }
  return rows;
}

SpecABCheck spec_ab_check(double lambda, double m, const PotentialSpec& p, const ToeplitzModel& model,
                          const Grid1D& grid) {
  require_inside(lambda, m, "spec_ab_check");
  if (model.matrix.size() != 0)
    throw std::invalid_argument("spec_ab_check: needs the radial Toeplitz model of the transverse profile");
  const int K = model.K();
  const long long N = grid.N;
  const std::size_t dim = 4 * static_cast<std::size_t>(K) * static_cast<std::size_t>(N);
  if (dim > 4096) throw std::invalid_argument("spec_ab_check: 4 K N must not exceed 4096");

  const Matrix4c root = p.matrix_part().sqrt_psd();
  std::vector<double> wg(static_cast<std::size_t>(N));
  double g_sum = 0.0;
  for (long long i = 0; i < N; ++i) {
    wg[static_cast<std::size_t>(i)] = trapezoid_weight(grid, i) * p.longitudinal().eval(grid.node(i));
    g_sum += wg[static_cast<std::size_t>(i)];
  }

  // K_+ maps sqrt(U) phi_k / sqrt(mu_k) (x) e_i (x) c to sqrt(mu_k) sqrt(w_i g_i) e1 e1^T V^{1/2} c (x) phi_k.
  Eigen::MatrixXcd kp = Eigen::MatrixXcd::Zero(4 * K, static_cast<Eigen::Index>(dim));
  for (int k = 0; k < K; ++k) {
    const double mu = std::exp(model.log_eigenvalues[static_cast<std::size_t>(k)]);
    for (long long i = 0; i < N; ++i) {
      const double f = std::sqrt(mu * wg[static_cast<std::size_t>(i)]);
      for (int b = 0; b < 4; ++b)
        kp(4 * k, (static_cast<Eigen::Index>(k) * N + i) * 4 + b) = f * root(0, b);
    }
  }
  const double pref = 0.5 * std::sqrt((m + lambda) / (m - lambda));
  const Eigen::MatrixXcd o_plus = pref * (kp.adjoint() * kp);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(o_plus, Eigen::EigenvaluesOnly);
  std::vector<double> eig(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(eig.begin(), eig.end(), std::greater<>());

  SpecABCheck c;
  c.lambda = lambda;
  c.dimension = dim;
  const double v11 = p.matrix_part()(0, 0).real();
  for (int k = 0; k < K; ++k) {
    c.omega_plus.push_back(pref * v11 * g_sum * std::exp(model.log_eigenvalues[static_cast<std::size_t>(k)]));
    c.o_plus.push_back(eig[static_cast<std::size_t>(k)]);
  }
  std::sort(c.omega_plus.begin(), c.omega_plus.end(), std::greater<>());
  for (int k = 0; k < K; ++k) {
    const double ref = c.omega_plus[static_cast<std::size_t>(k)];
    c.max_rel_diff = std::max(c.max_rel_diff, std::abs(c.o_plus[static_cast<std::size_t>(k)] - ref) / ref);
  }
  // Everything past the first K eigenvalues must vanish.
  if (eig.size() > static_cast<std::size_t>(K)) {
    const double rest = std::abs(eig[static_cast<std::size_t>(K)]) / std::max(eig.front(), 1e-300);
    c.max_rel_diff = std::max(c.max_rel_diff, rest);
  }
  return c;
}

CsvTable ssf_sweep_table(const std::vector<SsfSweepRow>& rows) {
  CsvTable t;
  t.header = {"lambda", "eps", "lower", "upper", "prediction", "ratio_mid_to_prediction"};
  for (const auto& r : rows)
    t.add({r.lambda, r.eps, r.bracket.lower, r.bracket.upper, r.prediction, r.ratio_mid_to_prediction});
  return t;
}

}  // namespace dssf
