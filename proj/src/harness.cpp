#include "dssf/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dssf/asymptotics.hpp"
#include "dssf/counting.hpp"
#include "dssf/dirac_algebra.hpp"
#include "dssf/discrete_model.hpp"
#include "dssf/kernels1d.hpp"
#include "dssf/landau.hpp"
#include "dssf/ssf.hpp"
#include "dssf/toeplitz.hpp"

namespace dssf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

const std::vector<std::string> kSections = {"scenario", "field", "potential", "truncation", "sweep", "output"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size() && std::isfinite(out);
}

// Converts text to the value kind of a key; appends to errors on failure.
bool convert(const ConfigKeyDef& def, const std::string& text, ConfigValue& out, std::string& error) {
  const std::string name = def.section + "." + def.key;
  switch (def.kind) {
    case ConfigKind::Text:
      out = trim(text);
      return true;
    case ConfigKind::Number:
    case ConfigKind::Integer: {
      double v = 0.0;
      if (!parse_number(text, v)) {
        error = name + ": expected a number, got '" + trim(text) + "'";
        return false;
      }
      if (def.kind == ConfigKind::Integer && v != std::floor(v)) {
        error = name + ": expected an integer, got '" + trim(text) + "'";
        return false;
      }
      out = v;
      return true;
    }
    case ConfigKind::List: {
      std::vector<double> vals;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        double v = 0.0;
        if (!parse_number(item, v)) {
          error = name + ": bad list entry '" + trim(item) + "'";
          return false;
        }
        vals.push_back(v);
      }
      out = vals;
      return true;
    }
  }
  return false;
}

std::string value_text(const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_short(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::string out;
  for (double x : std::get<std::vector<double>>(v)) {
    if (!out.empty()) out += ", ";
    out += format_short(x);
  }
  return out;
}

const ConfigKeyDef* find_def(const std::string& section, const std::string& key) {
  for (const auto& d : config_defaults())
    if (d.section == section && d.key == key) return &d;
  return nullptr;
}

// ---- objects built from a config ----

FieldSpec make_field(const ScenarioConfig& c) {
  const double b0 = c.num("field.b0");
  const std::string& kind = c.str("field.phi_tilde");
  if (kind == "none") return FieldSpec::constant(b0);
  const double a = c.num("field.phi_amplitude"), w = c.num("field.phi_width");
  std::ostringstream d;
  d << "bump(" << a << "," << w << ")";
  return FieldSpec(b0, [a, w](double r) { return a * std::exp(-(r / w) * (r / w)); }, d.str());
}

RadialProfile make_transverse(const ScenarioConfig& c) {
  const std::string& kind = c.str("potential.transverse");
  const double amp = c.num("potential.amplitude");
  if (kind == "exponential")
    return RadialProfile::stretched_exponential(amp, c.num("potential.eta"), c.num("potential.beta"));
  if (kind == "power") return RadialProfile::power_law(amp, c.num("potential.alpha"));
  return RadialProfile::disc(c.num("potential.radius"), amp);
}

LongitudinalProfile make_longitudinal(const ScenarioConfig& c) {
  if (c.str("potential.longitudinal") == "gaussian")
    return LongitudinalProfile::gaussian(c.num("potential.g_amplitude"), c.num("potential.g_width"));
  return LongitudinalProfile::power(c.num("potential.g_amplitude"), c.num("potential.nu3"));
}

HermitianMatrix4 make_matrix(const ScenarioConfig& c) {
  return alpha12_commutant(c.num("potential.v1"), c.num("potential.v2"),
                           cplx(c.num("potential.v3_re"), c.num("potential.v3_im")));
}

PotentialSpec make_potential(const ScenarioConfig& c) {
  return PotentialSpec(make_matrix(c), make_transverse(c), make_longitudinal(c), c.num("potential.nu"));
}

Pair make_pair(const ScenarioConfig& c) { return c.str("sweep.pair") == "h_plus" ? Pair::HPlus : Pair::HMinus; }

// ---- row helpers ----

std::string param_echo(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ";";
    out += std::string(k) + "=" + format_short(v);
  }
  return out;
}

ResultRow info(const std::string& scen, double lambda, double s, const std::string& metric, double value,
               std::string params = "", double error = kNaN) {
  ResultRow r;
  r.scenario = scen;
  r.lambda = lambda;
  r.s = s;
  r.metric = metric;
  r.value = value;
  r.error = error;
  r.lower = r.upper = kNaN;
  r.params = std::move(params);
  r.status = RowStatus::Info;
  return r;
}

ResultRow check(const std::string& scen, double lambda, double s, const std::string& metric, double value,
                double lower, double upper, std::string params = "", double error = kNaN) {
  ResultRow r = info(scen, lambda, s, metric, value, std::move(params), error);
  r.lower = lower;
  r.upper = upper;
  const bool ok = std::isfinite(value) && (std::isnan(lower) || value >= lower) && (std::isnan(upper) || value <= upper);
  r.status = ok ? RowStatus::Pass : RowStatus::Fail;
  return r;
}

// ---- scenarios ----

ScenarioResult run_toeplitz(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const FieldSpec field = make_field(c);
  const RadialProfile U = make_transverse(c);
  const auto& s_values = c.list("sweep.s");
  const double s_min = *std::min_element(s_values.begin(), s_values.end());
  const ToeplitzModel model = toeplitz_radial_adaptive(U, field, s_min, static_cast<int>(c.integer("truncation.k_max")));
  const AsymptoticLaw law = law_for_profile(U, field.b0());
  const LawComparison cmp = compare_law(model, law, s_values);
  const double lo = c.num("sweep.accept_lo"), hi = c.num("sweep.accept_hi");
  for (const auto& r : cmp.rows) {
    out.rows.push_back(info(scen, kNaN, r.s, "n_plus", static_cast<double>(r.n_plus)));
    out.rows.push_back(info(scen, kNaN, r.s, "law_value", r.law_value));
    out.rows.push_back(check(scen, kNaN, r.s, "count_ratio", r.ratio, lo, hi, "", r.staircase_halfwidth));
  }
  out.rows.push_back(info(scen, kNaN, kNaN, "truncation_K", model.K()));
  const RaikovCheck rk = check_raikov_bound(model, U, 1);
  out.rows.push_back(check(scen, kNaN, kNaN, "raikov_trace_bound", rk.lhs, kNaN, rk.rhs * (1.0 + 1e-10)));
  out.tables["spectrum"] = toeplitz_spectrum_table(model);
  out.tables["law"] = law_comparison_table(cmp);
  return out;
}

// The leading-order laws live on s < 1/e; farther from the threshold there is no prediction.
double prediction_or_nan(const AsymptoticLaw& law, double lambda, double m, Pair pair) {
  try {
    return predict_xi(law, lambda, m, pair);
  } catch (const std::domain_error&) {
    return kNaN;
  }
}

// Smallest transverse threshold needed so that every scaled spectrum stays adequate.
double transverse_s_min(double scaled_min, double factor) { return factor > 0.0 ? scaled_min / factor : 1.0; }

ScenarioResult run_ssf_inside(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const FieldSpec field = make_field(c);
  const PotentialSpec P = make_potential(c);
  const double m = c.num("potential.m"), eps = c.num("sweep.bracket_eps");
  const Pair pair = make_pair(c);
  const auto& lambdas = c.list("sweep.lambda");

  double s_min = 1.0;
  for (double l : lambdas) {
    const double fp = (1.0 - eps) * omega_threshold(l, m, CountSign::Plus);
    const double fm = (1.0 - eps) * omega_threshold(l, m, CountSign::Minus);
    s_min = std::min({s_min, transverse_s_min(fp, P.w_plus_factor()), transverse_s_min(fm, P.w_minus_factor())});
  }
  const ToeplitzModel model = toeplitz_radial_adaptive(P.transverse(), field, s_min,
                                                       static_cast<int>(c.integer("truncation.k_max")));
  const WSpectra w = make_w_spectra(P, model);

  std::vector<SsfSweepRow> sweep(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double l = lambdas[i];
    SsfSweepRow& r = sweep[i];
    r.lambda = l;
    r.eps = eps;
    r.bracket = xi_inside_bracket(l, m, eps, w, pair);
    if (r.bracket.bounded) {
      r.prediction = kNaN;
      r.ratio_mid_to_prediction = kNaN;
      return;
    }
    const AsymptoticLaw law = law_for_profile(l > 0.0 ? P.w_plus() : P.w_minus(), field.b0());
    r.prediction = prediction_or_nan(law, l, m, pair);
    r.ratio_mid_to_prediction = r.bracket.midpoint() / r.prediction;
  });
  const std::string pe = std::string("pair=") + pair_name(pair);
  for (const auto& r : sweep) {
    out.rows.push_back(info(scen, r.lambda, kNaN, "xi_lower", r.bracket.lower, pe));
    out.rows.push_back(info(scen, r.lambda, kNaN, "xi_upper", r.bracket.upper, pe));
    out.rows.push_back(info(scen, r.lambda, kNaN, "prediction", r.prediction, pe));
    out.rows.push_back(info(scen, r.lambda, kNaN, "mid_over_prediction", r.ratio_mid_to_prediction, pe));
    out.rows.push_back(check(scen, r.lambda, kNaN, "bracket_width", r.bracket.upper - r.bracket.lower, 0.0, kNaN, pe));
  }
  out.tables["sweep"] = ssf_sweep_table(sweep);
  return out;
}

ScenarioResult run_ssf_outside(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const FieldSpec field = make_field(c);
  const PotentialSpec P = make_potential(c);
  const double m = c.num("potential.m"), eps = c.num("sweep.bracket_eps");
  const Pair pair = make_pair(c);
  const bool full = c.str("potential.omega") == "full";
  const auto& lambdas = c.list("sweep.lambda");
  const Grid1D grid(c.num("truncation.grid_half_width"), c.integer("truncation.grid_points"));

  double s_min = 1.0;
  for (double l : lambdas) {
    const double ap = std::abs(l + m), am = std::abs(l - m);
    const double cp = 0.5 * std::sqrt(ap / am), cm = 0.5 * std::sqrt(am / ap);
    s_min = std::min({s_min, transverse_s_min(1.0 - eps, P.w_plus_factor() * cp),
                      transverse_s_min(1.0 - eps, P.w_minus_factor() * cm)});
    if (full) {
      // Largest kernel eigenvalue is at most tr(moments) tr(spinor part).
      const double k = std::sqrt(l * l - m * m);
      const double top = P.longitudinal().integral *
                         (ap * P.matrix_part()(0, 0).real() + am * P.matrix_part()(2, 2).real());
      if (top > 0.0) s_min = std::min(s_min, (1.0 - eps) * 2.0 * k / top);
    }
  }
  const ToeplitzModel model = toeplitz_radial_adaptive(P.transverse(), field, s_min,
                                                       static_cast<int>(c.integer("truncation.k_max")));
  const WSpectra w = make_w_spectra(P, model);

  struct Point {
    SsfSweepRow row;
    double direct = 0.0, staircase = 0.0, path_diff = 0.0;
    double full_minus_first = kNaN;
  };
  std::vector<Point> pts(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double l = lambdas[i];
    Point& p = pts[i];
    p.row.lambda = l;
    p.row.eps = eps;
    OmegaModel om;
    if (full) om = build_omega_full(l, m, P, model, grid);
    p.row.bracket = xi_outside_bracket(l, m, eps, full ? OmegaSource{nullptr, &om} : OmegaSource{&w, nullptr}, pair);
    try {
      const ArctanTrace t = trace_arctan_omega1(l, m, 1.0, w);
      p.direct = t.path_direct;
      p.staircase = t.path_staircase;
    } catch (const CrossCheckError&) {
      p.direct = trace_arctan(build_omega1(l, m, w), 0.0);
      p.staircase = kNaN;
    }
    p.path_diff = std::abs(p.direct - p.staircase);
    if (full) p.full_minus_first = trace_arctan(om.spectrum, 0.0) - p.direct;
    const bool bounded = (l > 0.0 && pair == Pair::HPlus) || (l < 0.0 && pair == Pair::HMinus);
    if (bounded) {
      p.row.prediction = kNaN;
      p.row.ratio_mid_to_prediction = kNaN;
    } else {
      const AsymptoticLaw law = law_for_profile(l > 0.0 ? P.w_plus() : P.w_minus(), field.b0());
      p.row.prediction = prediction_or_nan(law, l, m, pair);
      p.row.ratio_mid_to_prediction = p.row.bracket.midpoint() / p.row.prediction;
    }
  });
  const std::string pe = std::string("pair=") + pair_name(pair) + ";omega=" + (full ? "full" : "first");
  std::vector<SsfSweepRow> sweep;
  for (const auto& p : pts) {
    const double l = p.row.lambda;
    out.rows.push_back(info(scen, l, kNaN, "xi_lower", p.row.bracket.lower, pe));
    out.rows.push_back(info(scen, l, kNaN, "xi_upper", p.row.bracket.upper, pe));
    out.rows.push_back(info(scen, l, kNaN, "prediction", p.row.prediction, pe));
    out.rows.push_back(info(scen, l, kNaN, "mid_over_prediction", p.row.ratio_mid_to_prediction, pe));
    out.rows.push_back(info(scen, l, 1.0, "trace_arctan_omega1", p.direct, pe));
    out.rows.push_back(check(scen, l, 1.0, "arctan_path_difference", p.path_diff, kNaN, 1e-10, pe));
    if (full) out.rows.push_back(info(scen, l, 1.0, "full_minus_first_order", p.full_minus_first, pe));
    sweep.push_back(p.row);
  }
  out.tables["sweep"] = ssf_sweep_table(sweep);
  return out;
}

ScenarioResult run_levinson(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const FieldSpec field = make_field(c);
  const PotentialSpec P = make_potential(c);
  const double m = c.num("potential.m"), eps_b = c.num("sweep.bracket_eps");
  const Pair pair = make_pair(c);
  const auto& seq = c.list("sweep.eps_sequence");
  const double e_min = *std::min_element(seq.begin(), seq.end());
  const double r = std::sqrt(e_min / (2.0 - e_min));
  const double factor = pair == Pair::HMinus ? P.w_plus_factor() : P.w_minus_factor();
  const ToeplitzModel model = toeplitz_radial_adaptive(P.transverse(), field,
                                                       transverse_s_min(2.0 * r * (1.0 - eps_b), factor),
                                                       static_cast<int>(c.integer("truncation.k_max")));
  const WSpectra w = make_w_spectra(P, model);
  const AsymptoticLaw law = law_for_profile(pair == Pair::HMinus ? P.w_plus() : P.w_minus(), field.b0());
  const auto rows = levinson_ratio(law, pair, seq, m, eps_b, w);

  CsvTable t;
  t.header = {"eps", "lambda_inside", "lambda_outside", "inside_mid", "outside_mid", "ratio", "target"};
  const std::string pe = std::string("pair=") + pair_name(pair);
  for (const auto& r : rows) {
    t.add({r.eps, r.lambda_inside, r.lambda_outside, r.inside.midpoint(), r.outside.midpoint(), r.ratio, r.target});
    out.rows.push_back(info(scen, r.lambda_outside, kNaN, "ratio", r.ratio, pe + ";eps=" + format_short(r.eps)));
  }
  if (!rows.empty()) {
    // The sequence is taken in the given order; its last point is the endpoint.
    const auto& last = rows.back();
    out.rows.push_back(check(scen, kNaN, kNaN, "endpoint_ratio", last.ratio, c.num("sweep.accept_lo"),
                             c.num("sweep.accept_hi"), pe + ";target=" + format_short(last.target)));
    const std::size_t n = rows.size(), start = n >= 4 ? n - 4 : 0;
    double worst = 0.0;
    for (std::size_t i = start + 1; i < n; ++i)
      worst = std::max(worst, std::abs(rows[i].ratio - rows[i].target) - std::abs(rows[i - 1].ratio - rows[i - 1].target));
    out.rows.push_back(check(scen, kNaN, kNaN, "trend_distance_increase", worst, kNaN, 0.0, pe));
  }
  out.tables["levinson"] = t;
  return out;
}

ScenarioResult run_kernels(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const double m = c.num("potential.m"), nu3 = c.num("potential.kernel_nu3");
  const double X = c.num("truncation.kernel_half_width"), h = c.num("truncation.kernel_step");
  const Grid1D grid(X, static_cast<long long>(std::llround(2.0 * X / h)) + 1);
  const auto& lambdas = c.list("sweep.lambda");
  const auto& ps = c.list("sweep.p");

  std::vector<RankTwoImS> closed(lambdas.size());
  std::vector<GridSingularValues> sv(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    closed[i] = make_rank_two_im_s(lambdas[i], m, nu3);
    sv[i] = im_s_grid_singular_values(lambdas[i], m, nu3, grid);
  });
  CsvTable t;
  t.header = {"lambda", "p", "norm_closed_form", "norm_grid"};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    out.rows.push_back(check(scen, l, kNaN, "inner_vu", closed[i].inner_vu, kNaN, 1e-10));
    for (double p : ps) {
      const double a = closed[i].schatten(p), b = sv[i].schatten(p);
      t.add({l, p, a, b});
      out.rows.push_back(info(scen, l, kNaN, "schatten_closed_form", a, param_echo({{"p", p}})));
      out.rows.push_back(check(scen, l, kNaN, "schatten_rel_diff", std::abs(a - b) / a, kNaN, 1e-6,
                               param_echo({{"p", p}})));
    }
  }
  out.tables["norms"] = t;
  return out;
}

ScenarioResult run_dirac_check(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  out.rows.push_back(check(scen, kNaN, kNaN, "anticommutation_residual", anticommutation_residual(dirac_matrices()),
                           kNaN, 1e-12));
  const CommutantCheck cc = validate_alpha12_commutant(make_matrix(c));
  out.rows.push_back(check(scen, kNaN, kNaN, "commutant_residual", cc.commutator_residual, kNaN, 1e-12));

  const double b0 = c.num("field.b0"), m = c.num("potential.m");
  const DiscreteH0 h = build_h0(b0, m, static_cast<int>(c.integer("truncation.l")),
                                static_cast<int>(c.integer("truncation.n")), c.num("truncation.x"));
  const SquareIdentity sq = check_square_identity(h);
  const Eigen::VectorXd eig = h0_eigenvalues(h);
  const std::string pe = param_echo({{"b0", b0}, {"m", m}, {"L", h.L}, {"N", h.N}, {"X", h.X}});
  out.rows.push_back(check(scen, kNaN, kNaN, "gap_min_abs_eigenvalue", check_gap(h, eig), m * (1.0 - 1e-9),
                           m * (1.0 + 1e-9), pe));
  out.rows.push_back(check(scen, kNaN, kNaN, "square_identity_interior", sq.interior, kNaN, 1e-10, pe));
  out.rows.push_back(info(scen, kNaN, kNaN, "square_identity_top_level", sq.top, pe));
  out.rows.push_back(check(scen, kNaN, kNaN, "fiber_deviation", fiber_deviation(h, eig), kNaN, 1e-9, pe));
  out.rows.push_back(check(scen, kNaN, kNaN, "spectrum_symmetry", symmetry_defect(eig), kNaN, 1e-10, pe));

  std::vector<double> e(eig.data(), eig.data() + eig.size());
  std::sort(e.begin(), e.end());
  const auto pred = fiber_spectrum(h);
  CsvTable t;
  t.header = {"index", "eigenvalue", "fiber_prediction"};
  for (std::size_t i = 0; i < e.size(); ++i) t.add({static_cast<long long>(i), e[i], pred[i]});
  out.tables["spectrum"] = t;
  return out;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = n(rng);
      a(i, j) = cplx(re, n(rng));
    }
  return a;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const Eigen::MatrixXcd a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

Eigen::MatrixXcd random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const Eigen::MatrixXcd g = random_matrix(rng, n, rank);
  return g * g.adjoint() / static_cast<double>(rank);
}

ScenarioResult run_identities(const ScenarioConfig& c) {
  const std::string scen = c.scenario();
  ScenarioResult out;
  const auto n = static_cast<std::size_t>(c.integer("sweep.instances"));
  const auto max_dim = static_cast<int>(c.integer("sweep.max_dim"));
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("scenario.seed")));
  std::uniform_int_distribution<int> dim(2, max_dim);
  std::uniform_real_distribution<double> unit(0.05, 2.0);

  // All random data is drawn sequentially before any parallel work.
  struct Pair2 {
    Eigen::MatrixXcd a, b;
    double s1, s2;
  };
  std::vector<Pair2> arctan(n), flip(2 * n), weyl(10 * n), averaged(2 * n);
  for (auto& p : arctan) {
    const int d = dim(rng);
    p.b = random_psd(rng, d, d + 2);
    p.s1 = unit(rng);
  }
  for (auto& p : flip) {
    const int r = dim(rng), k = dim(rng);
    p.a = random_matrix(rng, r, k);
    p.s1 = unit(rng);
  }
  for (auto& p : weyl) {
    const int d = std::min(dim(rng), 12);
    p.a = random_hermitian(rng, d);
    p.b = random_hermitian(rng, d);
    p.s1 = unit(rng);
    p.s2 = unit(rng);
  }
  for (auto& p : averaged) {
    const int d = std::min(dim(rng), 10);
    p.a = random_hermitian(rng, d);
    p.b = random_psd(rng, d, std::max(1, d / 2));
    p.s1 = unit(rng);
    p.s2 = unit(rng);
  }

  std::vector<double> arctan_diff(arctan.size());
  parallel_for(arctan.size(), [&](std::size_t i) {
    const auto& p = arctan[i];
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(p.b.rows(), p.b.cols());
    const double quad = mu_average_counting(p.s1, zero, p.b).value;
    const double closed = arctan_trace_identity(p.s1, LogSpectrum::from_matrix(p.b)).rhs;
    arctan_diff[i] = std::abs(quad - closed);
  });
  std::vector<char> flip_bad(flip.size()), weyl_bad(weyl.size()), pbound_bad(weyl.size()), averaged_bad(averaged.size());
  parallel_for(flip.size(), [&](std::size_t i) { flip_bad[i] = !check_flip(flip[i].a, flip[i].s1); });
  parallel_for(weyl.size(), [&](std::size_t i) {
    const auto& p = weyl[i];
    weyl_bad[i] = !check_weyl(p.s1, p.s2, p.a, p.b);
    pbound_bad[i] = !check_pbound(p.s1, LogSpectrum::from_matrix(p.a), 1 + static_cast<int>(i % 4));
  });
  parallel_for(averaged.size(), [&](std::size_t i) {
    const auto& p = averaged[i];
    averaged_bad[i] = !check_pushnitski_bound(p.s1, p.s2, p.a, p.b);
  });
  auto count = [](const std::vector<char>& v) { return static_cast<double>(std::count(v.begin(), v.end(), 1)); };
  const double max_arctan = arctan_diff.empty() ? 0.0 : *std::max_element(arctan_diff.begin(), arctan_diff.end());
  out.rows.push_back(check(scen, kNaN, kNaN, "arctan_quadrature_vs_closed_form", max_arctan, kNaN, 1e-10,
                           param_echo({{"instances", static_cast<double>(arctan.size())}})));
  out.rows.push_back(check(scen, kNaN, kNaN, "flip_failures", count(flip_bad), kNaN, 0.0,
                           param_echo({{"instances", static_cast<double>(flip.size())}})));
  out.rows.push_back(check(scen, kNaN, kNaN, "weyl_violations", count(weyl_bad), kNaN, 0.0,
                           param_echo({{"instances", static_cast<double>(weyl.size())}})));
  out.rows.push_back(check(scen, kNaN, kNaN, "pbound_violations", count(pbound_bad), kNaN, 0.0,
                           param_echo({{"instances", static_cast<double>(weyl.size())}})));
  out.rows.push_back(check(scen, kNaN, kNaN, "averaged_count_bound_violations", count(averaged_bad), kNaN, 0.0,
                           param_echo({{"instances", static_cast<double>(averaged.size())}})));

  // Spectral identities of the potential from the config.
  const FieldSpec field = make_field(c);
  const PotentialSpec P = make_potential(c);
  const double m = c.num("potential.m");
  const auto& lambdas = c.list("sweep.lambda");
  const ToeplitzModel model = toeplitz_radial_adaptive(P.transverse(), field, 1e-6,
                                                       static_cast<int>(c.integer("truncation.k_max")));
  const WSpectra w = make_w_spectra(P, model);
  std::vector<double> diffs(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    try {
      const ArctanTrace t = trace_arctan_omega1(lambdas[i], m, 1.0, w);
      diffs[i] = std::abs(t.path_direct - t.path_staircase);
    } catch (const CrossCheckError&) {
      diffs[i] = kNaN;
    }
  });
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    out.rows.push_back(check(scen, lambdas[i], 1.0, "arctan_trace_paths", diffs[i], kNaN, 1e-10));

  const LLLBasis basis = build_lll_basis(field, static_cast<int>(c.integer("truncation.ab_k")));
  const ToeplitzModel small = toeplitz_radial_spectrum(P.transverse(), basis);
  const Grid1D ab_grid(c.num("truncation.ab_half_width"), c.integer("truncation.ab_points"));
  const auto& ab = c.list("sweep.ab_lambda");
  std::vector<double> rel(ab.size());
  parallel_for(ab.size(), [&](std::size_t i) { rel[i] = spec_ab_check(ab[i], m, P, small, ab_grid).max_rel_diff; });
  for (std::size_t i = 0; i < ab.size(); ++i)
    out.rows.push_back(check(scen, ab[i], kNaN, "finite_rank_spectra_rel_diff", rel[i], kNaN, 1e-9));
  return out;
}

using Runner = ScenarioResult (*)(const ScenarioConfig&);
const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r = {
      {"toeplitz-asymptotics", run_toeplitz}, {"ssf-inside", run_ssf_inside}, {"ssf-outside", run_ssf_outside},
      {"levinson", run_levinson},             {"kernels", run_kernels},       {"dirac-check", run_dirac_check},
      {"identities", run_identities}};
  return r;
}

double sort_key(double v) { return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v; }

}  // namespace

// ---- ScenarioConfig ----

double ScenarioConfig::num(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end() || !std::holds_alternative<double>(it->second))
    throw std::out_of_range("config: no numeric key " + key);
  return std::get<double>(it->second);
}

long long ScenarioConfig::integer(const std::string& key) const { return std::llround(num(key)); }

const std::string& ScenarioConfig::str(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end() || !std::holds_alternative<std::string>(it->second))
    throw std::out_of_range("config: no text key " + key);
  return std::get<std::string>(it->second);
}

const std::vector<double>& ScenarioConfig::list(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end() || !std::holds_alternative<std::vector<double>>(it->second))
    throw std::out_of_range("config: no list key " + key);
  return std::get<std::vector<double>>(it->second);
}

const std::vector<ConfigKeyDef>& config_defaults() {
  using K = ConfigKind;
  static const std::vector<ConfigKeyDef> defs = {
      {"scenario", "name", K::Text, "identities", "one of list-scenarios"},
      {"scenario", "seed", K::Integer, "20240611", "seed of the random instances (identities)"},
      {"field", "b0", K::Number, "2", "constant part of the magnetic field"},
      {"field", "phi_tilde", K::Text, "none", "none | bump (a exp(-(r/w)^2) added to the potential phi)"},
      {"field", "phi_amplitude", K::Number, "0.1", "bump amplitude a"},
      {"field", "phi_width", K::Number, "1", "bump width w"},
      {"potential", "m", K::Number, "1", "mass"},
      {"potential", "nu", K::Number, "5", "decay exponent of V"},
      {"potential", "v1", K::Number, "3", "matrix part entry V11 = V44"},
      {"potential", "v2", K::Number, "3", "matrix part entry V22 = V33"},
      {"potential", "v3_re", K::Number, "1", "matrix part entry V13, real part"},
      {"potential", "v3_im", K::Number, "0", "matrix part entry V13, imaginary part"},
      {"potential", "transverse", K::Text, "exponential", "exponential | power | disc"},
      {"potential", "amplitude", K::Number, "1", "transverse amplitude"},
      {"potential", "eta", K::Number, "1", "exponential: rate eta"},
      {"potential", "beta", K::Number, "1", "exponential: exponent beta"},
      {"potential", "alpha", K::Number, "4", "power: decay alpha"},
      {"potential", "radius", K::Number, "1", "disc: radius"},
      {"potential", "longitudinal", K::Text, "gaussian", "gaussian | power"},
      {"potential", "g_amplitude", K::Number, "0.56418958354775628", "longitudinal amplitude (1/sqrt(pi): unit mass)"},
      {"potential", "g_width", K::Number, "1", "gaussian width"},
      {"potential", "nu3", K::Number, "6", "power longitudinal decay"},
      {"potential", "kernel_nu3", K::Number, "3", "weight exponent of the one-dimensional kernels"},
      {"potential", "omega", K::Text, "first", "first | full (Omega model used outside the gap)"},
      {"truncation", "k_max", K::Integer, "400000", "largest Toeplitz truncation"},
      {"truncation", "l", K::Integer, "8", "Landau levels of the discrete H0"},
      {"truncation", "n", K::Integer, "32", "Fourier modes of the discrete H0"},
      {"truncation", "x", K::Number, "20", "box half-width of the discrete H0"},
      {"truncation", "grid_half_width", K::Number, "40", "longitudinal grid half-width (full Omega)"},
      {"truncation", "grid_points", K::Integer, "8001", "longitudinal grid points (full Omega)"},
      {"truncation", "kernel_half_width", K::Number, "65536", "kernel grid half-width"},
      {"truncation", "kernel_step", K::Number, "0.125", "kernel grid step"},
      {"truncation", "ab_k", K::Integer, "6", "angular momenta in the finite-rank comparison"},
      {"truncation", "ab_points", K::Integer, "32", "longitudinal points in the finite-rank comparison"},
      {"truncation", "ab_half_width", K::Number, "6", "longitudinal half-width in the finite-rank comparison"},
      {"sweep", "lambda", K::List, "1.5, 1.1, 1.01, 1.001", "spectral parameters"},
      {"sweep", "ab_lambda", K::List, "0, 0.5, 0.9", "spectral parameters of the finite-rank comparison"},
      {"sweep", "s", K::List, "1e-2, 1e-4, 1e-6, 1e-8", "thresholds"},
      {"sweep", "p", K::List, "1, 2, 4", "Schatten exponents"},
      {"sweep", "bracket_eps", K::Number, "0.1", "epsilon of the xi brackets"},
      {"sweep", "eps_sequence", K::List, "0.4096, 0.1024, 0.0256, 0.0064, 0.0016, 0.0004, 0.0001",
       "distances 1 - lambda/m (Levinson)"},
      {"sweep", "pair", K::Text, "h_minus", "h_minus | h_plus"},
      {"sweep", "accept_lo", K::Number, "0.85", "lower acceptance bound of the scenario ratio"},
      {"sweep", "accept_hi", K::Number, "1.15", "upper acceptance bound of the scenario ratio"},
      {"sweep", "instances", K::Integer, "20", "random instances per identity family (scaled per family)"},
      {"sweep", "max_dim", K::Integer, "40", "largest random matrix dimension"},
      {"output", "path", K::Text, "", "main CSV (default <scenario>.csv)"},
  };
  return defs;
}

const std::map<std::pair<std::string, std::string>, std::string>& scenario_overrides() {
  static const std::map<std::pair<std::string, std::string>, std::string> o = {
      {{"ssf-inside", "sweep.lambda"}, "0.99, 0.999, 0.9999, 0.99999"},
      {{"ssf-outside", "sweep.lambda"}, "1.01, 1.001, 1.0001, 1.00001"},
      {{"kernels", "sweep.lambda"}, "1.01, 1.5, 2, 5"},
      {{"levinson", "sweep.accept_lo"}, "0.35"},
      {{"levinson", "sweep.accept_hi"}, "0.65"},
      {{"dirac-check", "field.b0"}, "1"},
  };
  return o;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

ScenarioConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  struct Entry {
    std::string section, key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        errors.push_back("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    if (section.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": key outside any section");
      continue;
    }
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }

  std::string scenario = "identities";
  for (const auto& e : entries)
    if (e.section == "scenario" && e.key == "name") scenario = e.value;

  ScenarioConfig c;
  for (const auto& d : config_defaults()) {
    const std::string name = d.section + "." + d.key;
    std::string text_value = d.default_text;
    if (const auto it = scenario_overrides().find({scenario, name}); it != scenario_overrides().end())
      text_value = it->second;
    ConfigValue v;
    std::string err;
    convert(d, text_value, v, err);
    c.values[name] = v;
  }
  std::map<std::string, int> seen;
  for (const auto& e : entries) {
    const ConfigKeyDef* d = find_def(e.section, e.key);
    const std::string name = e.section + "." + e.key;
    if (!d) {
      if (std::find(kSections.begin(), kSections.end(), e.section) != kSections.end())
        errors.push_back("line " + std::to_string(e.line) + ": unknown key " + name);
      continue;
    }
    if (seen.count(name))
      errors.push_back("line " + std::to_string(e.line) + ": duplicate key " + name);
    seen[name] = e.line;
    ConfigValue v;
    std::string err;
    if (convert(*d, e.value, v, err)) c.values[name] = v;
    else errors.push_back("line " + std::to_string(e.line) + ": " + err);
  }
  // Keys that failed to convert keep their defaults, so the guards still apply.
  for (auto& e : validate_config(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config " + path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string out;
  for (const auto& sec : kSections) {
    out += "[" + sec + "]\n";
    for (const auto& d : config_defaults()) {
      if (d.section != sec) continue;
      const auto it = c.values.find(d.section + "." + d.key);
      if (it == c.values.end()) continue;
      out += d.key + " = " + value_text(it->second) + "\n";
    }
    out += "\n";
  }
  return out;
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  const std::string& scen = c.scenario();
  need(runners().count(scen) == 1, "scenario.name: unknown scenario '" + scen + "'");

  const double b0 = c.num("field.b0");
  need(b0 > 0.0, "FieldSpec: b0 > 0 is required (b0 = " + format_short(b0) + ")");
  const std::string& pt = c.str("field.phi_tilde");
  need(pt == "none" || pt == "bump", "FieldSpec: phi_tilde must be none or bump");
  if (pt == "bump") need(c.num("field.phi_width") > 0.0, "FieldSpec: phi_width > 0 is required");

  const double m = c.num("potential.m");
  need(m > 0.0, "mass: m > 0 is required");
  const double nu = c.num("potential.nu");
  need(nu > 3.0, "PotentialSpec: nu > 3 is required (nu = " + format_short(nu) + ")");
  const std::string& tr = c.str("potential.transverse");
  need(tr == "exponential" || tr == "power" || tr == "disc", "RadialProfile: transverse must be exponential, power or disc");
  const std::string& lg = c.str("potential.longitudinal");
  need(lg == "gaussian" || lg == "power", "LongitudinalProfile: longitudinal must be gaussian or power");
  const std::string& om = c.str("potential.omega");
  need(om == "first" || om == "full", "potential.omega must be first or full");
  need(c.num("potential.kernel_nu3") > 1.0, "kernels: kernel_nu3 > 1 is required");
  if (errors.empty()) {
    // Construct the downstream objects; their guards report what is wrong.
    try {
      make_field(c);
    } catch (const std::exception& e) {
      errors.push_back(std::string("FieldSpec: ") + e.what());
    }
    try {
      const HermitianMatrix4 v = make_matrix(c);
      need(v.is_psd(), "PotentialSpec: matrix part must be positive semidefinite");
    } catch (const std::exception& e) {
      errors.push_back(std::string("HermitianMatrix4: ") + e.what());
    }
    try {
      make_potential(c);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  need(c.integer("truncation.k_max") >= 1, "ToeplitzModel: k_max >= 1 is required");
  need(c.integer("truncation.l") >= 1, "DiscreteH0: L >= 1 is required");
  const long long n = c.integer("truncation.n");
  need(n >= 4 && n % 2 == 0, "DiscreteH0: N must be even and >= 4");
  need(c.num("truncation.x") > 0.0, "DiscreteH0: X > 0 is required");
  need(c.num("truncation.grid_half_width") > 0.0 && c.integer("truncation.grid_points") >= 3,
       "Grid1D: half-width > 0 and at least 3 points are required");
  need(c.num("truncation.kernel_half_width") > 0.0 && c.num("truncation.kernel_step") > 0.0,
       "Grid1D: kernel grid half-width and step must be positive");
  need(c.integer("truncation.ab_k") >= 1 && c.integer("truncation.ab_points") >= 3 &&
           c.num("truncation.ab_half_width") > 0.0,
       "finite-rank comparison: ab_k >= 1, ab_points >= 3 and ab_half_width > 0 are required");
  need(4 * c.integer("truncation.ab_k") * c.integer("truncation.ab_points") <= 4096,
       "finite-rank comparison: 4 ab_k ab_points <= 4096 is required");

  const double eps = c.num("sweep.bracket_eps");
  need(eps > 0.0 && eps < 1.0, "BracketEstimate: bracket_eps must lie in (0, 1)");
  for (double s : c.list("sweep.s")) need(s > 0.0, "counting: thresholds s must be positive");
  need(!c.list("sweep.s").empty(), "sweep.s must not be empty");
  for (double p : c.list("sweep.p")) need(p >= 1.0, "Schatten norms: p >= 1 is required");
  for (double e : c.list("sweep.eps_sequence")) need(e > 0.0 && e < 1.0, "levinson: eps_sequence entries must lie in (0, 1)");
  need(!c.list("sweep.eps_sequence").empty(), "levinson: eps_sequence must not be empty");
  const std::string& pair = c.str("sweep.pair");
  need(pair == "h_minus" || pair == "h_plus", "sweep.pair must be h_minus or h_plus");
  need(c.integer("sweep.instances") >= 1, "identities: instances >= 1 is required");
  need(c.integer("sweep.max_dim") >= 2, "identities: max_dim >= 2 is required");
  for (double l : c.list("sweep.ab_lambda")) need(std::abs(l) < m, "finite-rank comparison: |lambda| < m is required (lambda = " + format_short(l) + ")");

  const auto& lambdas = c.list("sweep.lambda");
  if (scen == "ssf-inside")
    for (double l : lambdas) need(std::abs(l) < m && l != 0.0, "ssf-inside: 0 < |lambda| < m is required (lambda = " + format_short(l) + ")");
  if (scen == "ssf-outside" || scen == "kernels" || scen == "identities")
    for (double l : lambdas) need(std::abs(l) > m, scen + ": |lambda| > m is required (lambda = " + format_short(l) + ")");
  if (scen == "toeplitz-asymptotics")
    for (double s : c.list("sweep.s")) need(s < std::exp(-1.0), "asymptotic laws: s < 1/e is required");
  return errors;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, r] : runners()) v.push_back(k);
    return v;
  }();
  return names;
}

const char* status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Pass: return "pass";
    case RowStatus::Fail: return "fail";
    default: return "info";
  }
}

bool ScenarioResult::all_pass() const { return failures() == 0; }

std::size_t ScenarioResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.status == RowStatus::Fail; }));
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
  const auto it = runners().find(c.scenario());
  if (it == runners().end()) throw std::invalid_argument("unknown scenario '" + c.scenario() + "'");
  ScenarioResult r;
  try {
    r = it->second(c);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario " + c.scenario() + ": " + e.what());
  }
  sort_rows(r.rows);
  return r;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (sort_key(a.lambda) != sort_key(b.lambda)) return sort_key(a.lambda) < sort_key(b.lambda);
    if (sort_key(a.s) != sort_key(b.s)) return sort_key(a.s) < sort_key(b.s);
    if (a.metric != b.metric) return a.metric < b.metric;
    return a.params < b.params;
  });
}

CsvTable rows_table(const std::vector<ResultRow>& rows) {
  CsvTable t;
  t.header = {"scenario", "lambda", "s", "params", "metric", "value", "error", "lower", "upper", "status"};
  for (const auto& r : rows)
    t.add({r.scenario, r.lambda, r.s, r.params, r.metric, r.value, r.error, r.lower, r.upper,
           std::string(status_name(r.status))});
  return t;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) { write_csv(rows_table(rows), path); }

std::vector<std::string> write_result(const ScenarioResult& r, const std::string& path) {
  std::vector<std::string> written;
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create " + p.parent_path().string() + ": " + ec.message());
  }
  emit_csv(r.rows, path);
  written.push_back(path);
  for (const auto& [name, table] : r.tables) {
    std::filesystem::path q = p.parent_path() / (p.stem().string() + "." + name + ".csv");
    write_csv(table, q.string());
    written.push_back(q.string());
  }
  return written;
}

}  // namespace dssf
