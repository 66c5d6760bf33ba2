#include "dssf/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dssf/quadrature.hpp"

namespace dssf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double s, const char* who) {
  if (!(s > 0.0)) throw std::invalid_argument(std::string(who) + ": threshold must be positive");
}

void require_square_same(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void require_hermitian(const Eigen::MatrixXcd& a, const char* who) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(who) + ": matrix is not hermitian");
}

}  // namespace

LogSpectrum LogSpectrum::from_values(const std::vector<double>& values) {
  LogSpectrum s;
  s.entries_.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("LogSpectrum: non-finite eigenvalue");
    const int sg = (v > 0) - (v < 0);
    s.entries_.push_back({sg == 0 ? -kInf : std::log(std::abs(v)), sg});
  }
  s.sort_entries();
  return s;
}

LogSpectrum LogSpectrum::from_logs(const std::vector<double>& log_abs, const std::vector<int>& signs) {
  if (log_abs.size() != signs.size()) throw std::invalid_argument("LogSpectrum: size mismatch");
  LogSpectrum s;
  s.entries_.reserve(log_abs.size());
  for (std::size_t i = 0; i < log_abs.size(); ++i) {
    int sg = signs[i];
    double la = log_abs[i];
    if (sg != 0 && sg != 1 && sg != -1) throw std::invalid_argument("LogSpectrum: bad sign");
    if (std::isnan(la) || la == kInf) throw std::invalid_argument("LogSpectrum: bad log value");
    if (la == -kInf) sg = 0;
    if (sg == 0) la = -kInf;
    s.entries_.push_back({la, sg});
  }
  s.sort_entries();
  return s;
}

LogSpectrum LogSpectrum::from_matrix(const Eigen::MatrixXcd& hermitian) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(hermitian);
  return from_values(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

void LogSpectrum::sort_entries() {
  auto key = [](const Entry& e) { return std::pair<int, double>(e.sign, e.sign * e.log_abs); };
  std::stable_sort(entries_.begin(), entries_.end(), [&](const Entry& a, const Entry& b) {
    if (a.sign != b.sign) return a.sign > b.sign;
    if (a.sign == 0) return false;
    return key(a).second > key(b).second;
  });
}

std::size_t LogSpectrum::n_plus_log(double log_s) const {
  // Positive entries form a prefix sorted by decreasing log_abs.
  auto end = std::find_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.sign <= 0; });
  auto it = std::partition_point(entries_.begin(), end,
                                 [&](const Entry& e) { return e.log_abs > log_s; });
  return static_cast<std::size_t>(it - entries_.begin());
}

std::size_t LogSpectrum::n_minus_log(double log_s) const {
  // Negative entries form a suffix sorted by increasing log_abs.
  auto begin = std::find_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.sign < 0; });
  auto it = std::partition_point(begin, entries_.end(),
                                 [&](const Entry& e) { return e.log_abs <= log_s; });
  return static_cast<std::size_t>(entries_.end() - it);
}

std::size_t LogSpectrum::n_plus(double s) const {
  require_positive(s, "n_plus");
  return n_plus_log(std::log(s));
}

std::size_t LogSpectrum::n_minus(double s) const {
  require_positive(s, "n_minus");
  return n_minus_log(std::log(s));
}

std::size_t LogSpectrum::near_threshold(double s, double rel) const {
  require_positive(s, "near_threshold");
  const double ls = std::log(s);
  std::size_t n = 0;
  for (const auto& e : entries_)
    if (e.sign != 0 && std::abs(e.log_abs - ls) <= rel) ++n;
  return n;
}

LogSpectrum LogSpectrum::scaled(double log_factor) const {
  if (!std::isfinite(log_factor)) throw std::invalid_argument("LogSpectrum::scaled: bad factor");
  LogSpectrum out = *this;
  for (auto& e : out.entries_)
    if (e.sign != 0) e.log_abs += log_factor;
  out.log_floor_ = log_floor_ + log_factor;
  return out;
}

LogSpectrum LogSpectrum::merged(const LogSpectrum& other) const {
  LogSpectrum out = *this;
  out.entries_.insert(out.entries_.end(), other.entries_.begin(), other.entries_.end());
  out.log_floor_ = std::max(log_floor_, other.log_floor_);
  out.sort_entries();
  return out;
}

LogSpectrum LogSpectrum::negated() const {
  LogSpectrum out = *this;
  for (auto& e : out.entries_) e.sign = -e.sign;
  out.sort_entries();
  return out;
}

double LogSpectrum::log_schatten_power(double p) const {
  std::vector<double> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_)
    if (e.sign != 0) t.push_back(p * e.log_abs);
  return t.empty() ? -kInf : log_sum_exp(t);
}

std::vector<double> LogSpectrum::values() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& e : entries_) v.push_back(e.sign == 0 ? 0.0 : e.sign * std::exp(e.log_abs));
  return v;
}

bool LogSpectrum::adequate_for_log(double log_s) const {
  return log_floor_ < log_s + std::log(1e-3);
}

bool LogSpectrum::adequate_for(double s) const {
  require_positive(s, "adequate_for");
  return adequate_for_log(std::log(s));
}

std::size_t n_plus(double s, const LogSpectrum& spec) { return spec.n_plus(s); }
std::size_t n_minus(double s, const LogSpectrum& spec) { return spec.n_minus(s); }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return Eigen::VectorXd();
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::size_t count_above(const Eigen::VectorXd& eig, double s) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (eig[i] > s) ++n;
  return n;
}

bool check_weyl(double s1, double s2, const Eigen::MatrixXcd& t1, const Eigen::MatrixXcd& t2) {
  require_positive(s1, "check_weyl");
  require_positive(s2, "check_weyl");
  require_square_same(t1, t2, "check_weyl");
  require_hermitian(t1, "check_weyl");
  require_hermitian(t2, "check_weyl");
  const Eigen::VectorXd e1 = hermitian_eigenvalues(t1);
  const Eigen::VectorXd e2 = hermitian_eigenvalues(t2);
  const Eigen::VectorXd e12 = hermitian_eigenvalues(t1 + t2);
  const bool plus = count_above(e12, s1 + s2) <= count_above(e1, s1) + count_above(e2, s2);
  const bool minus =
      count_above(-e12, s1 + s2) <= count_above(-e1, s1) + count_above(-e2, s2);
  return plus && minus;
}

bool check_pbound(double s, const LogSpectrum& spec, int p) {
  require_positive(s, "check_pbound");
  if (p < 1) throw std::invalid_argument("check_pbound: p must be >= 1");
  const double log_rhs = spec.log_schatten_power(p) - p * std::log(s);
  auto ok = [&](std::size_t n) { return n == 0 || std::log(static_cast<double>(n)) <= log_rhs; };
  return ok(spec.n_plus(s)) && ok(spec.n_minus(s));
}

namespace {

// Counting function t -> n_+(s; A + tB) parametrised by theta = atan t.
class ThetaCounter {
 public:
  ThetaCounter(double s, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
      : s_(s), real_(a.imag().cwiseAbs().maxCoeff() == 0.0 && b.imag().cwiseAbs().maxCoeff() == 0.0),
        a_(a), b_(b) {}

  std::size_t operator()(double theta) const {
    const double c = std::cos(theta), sn = std::sin(theta);
    Eigen::MatrixXcd m = c * a_ + sn * b_;
    m.diagonal().array() -= c * s_;
    return count_above(hermitian_eigenvalues(m), 0.0);
  }

  bool is_real() const { return real_; }

 private:
  double s_;
  bool real_;
  Eigen::MatrixXcd a_, b_;
};

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = m.real();
  r.topRightCorner(n, n) = -m.imag();
  r.bottomLeftCorner(n, n) = m.imag();
  r.bottomRightCorner(n, n) = m.real();
  return r;
}

// Generalized eigenvalues t of (sI - A) v = t B v, as angles atan(t).
std::vector<double> candidate_angles(double s, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                     bool real) {
  Eigen::MatrixXd lhs, rhs;
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd shifted = -a;
  shifted.diagonal().array() += s;
  if (real) {
    lhs = shifted.real();
    rhs = b.real();
  } else {
    lhs = real_embedding(shifted);
    rhs = real_embedding(b);
  }
  (void)n;
  std::vector<double> out;
  const double bscale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(lhs, rhs, false);
  if (ges.info() != Eigen::Success) return out;
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    const double beta = betas[i];
    if (std::abs(beta) <= 1e-14 * bscale) continue;
    const std::complex<double> t = alphas[i] / beta;
    if (std::abs(t.imag()) > 1e-6 * (1.0 + std::abs(t.real()))) continue;
    out.push_back(std::atan(t.real()));
  }
  return out;
}

}  // namespace

MuAverage mu_average_counting(double s, const Eigen::MatrixXcd& a_in, const Eigen::MatrixXcd& b_in,
                              CountSign sign) {
  require_positive(s, "mu_average_counting");
  require_square_same(a_in, b_in, "mu_average_counting");
  require_hermitian(a_in, "mu_average_counting");
  require_hermitian(b_in, "mu_average_counting");
  MuAverage out;
  if (a_in.rows() == 0) return out;
  {
    const Eigen::VectorXd eb = hermitian_eigenvalues(b_in);
    if (eb.minCoeff() < -1e-12 * std::max(1.0, eb.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("mu_average_counting: B must be positive semi-definite");
  }
  // n_-(s; A + tB) = n_+(s; -A - tB).
  const double sg = sign == CountSign::Plus ? 1.0 : -1.0;
  const Eigen::MatrixXcd a = sg * a_in;
  const Eigen::MatrixXcd b = sg * b_in;
  ThetaCounter count(s, a, b);

  const double half_pi = 0.5 * std::numbers::pi;
  std::vector<double> cand = candidate_angles(s, a, b, count.is_real());
  std::sort(cand.begin(), cand.end());
  std::vector<double> pts{-half_pi};
  for (double c : cand)
    if (c - pts.back() > 1e-13 && half_pi - c > 1e-13) pts.push_back(c);
  pts.push_back(half_pi);

  // The count is monotone in theta (B is semi-definite), so equal counts at
  // both ends of an interval mean it is constant there. Unequal ends hide a
  // jump the pencil missed; bisection then localises it to 1e-12.
  struct Piece {
    double lo, hi;
    std::size_t n;
  };
  std::vector<Piece> pieces;
  std::size_t bisections = 0;
  std::function<void(double, double, std::size_t, std::size_t, int)> resolve =
      [&](double lo, double hi, std::size_t nlo, std::size_t nhi, int depth) {
        if (nlo == nhi) {
          pieces.push_back({lo, hi, nlo});
          return;
        }
        if (hi - lo < 1e-12 || depth > 80) {
          // Jump localised; split the sliver evenly between the two counts.
          const double mid = 0.5 * (lo + hi);
          pieces.push_back({lo, mid, nlo});
          pieces.push_back({mid, hi, nhi});
          ++bisections;
          return;
        }
        const double mid = 0.5 * (lo + hi);
        const std::size_t nm = count(mid);
        resolve(lo, mid, nlo, nm, depth + 1);
        resolve(mid, hi, nm, nhi, depth + 1);
      };

  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const double lo = pts[j], hi = pts[j + 1];
    const double delta = std::min(1e-10, 0.25 * (hi - lo));
    const double x0 = lo + delta, x1 = hi - delta;
    const std::size_t n0 = count(x0), n1 = count(x1);
    // The edges [lo, x0] and [x1, hi] sit against a pencil eigenvalue; they are
    // assigned to the interior count (error at most delta/pi per jump).
    pieces.push_back({lo, x0, n0});
    resolve(x0, x1, n0, n1, 0);
    pieces.push_back({x1, hi, n1});
  }

  double acc = 0.0;
  for (const auto& p : pieces) acc += static_cast<double>(p.n) * (p.hi - p.lo);
  out.value = acc / std::numbers::pi;
  out.jumps = pts.size() - 2 + bisections;
  out.bisections = bisections;
  return out;
}

ArctanIdentity arctan_trace_identity(double s, const LogSpectrum& spec) {
  require_positive(s, "arctan_trace_identity");
  const double ls = std::log(s);
  ArctanIdentity r;
  double tails = 0.0, direct = 0.0;
  for (const auto& e : spec.entries()) {
    if (e.sign < 0) throw std::invalid_argument("arctan_trace_identity: negative eigenvalue");
    if (e.sign == 0) continue;
    // mu{t > s/lambda} = 1/2 - atan(s/lambda)/pi.
    tails += 0.5 - std::atan(std::exp(ls - e.log_abs)) / std::numbers::pi;
    direct += std::atan(std::exp(e.log_abs - ls));
  }
  r.lhs = tails;
  r.rhs = direct / std::numbers::pi;
  if (std::abs(r.lhs - r.rhs) > 1e-12 * std::max(1.0, r.rhs))
    throw CrossCheckError("arctan_trace_identity: Cauchy-tail and direct sums disagree");
  return r;
}

bool check_flip(const Eigen::MatrixXcd& b, double s) {
  require_positive(s, "check_flip");
  const Eigen::VectorXd e1 = hermitian_eigenvalues(b.adjoint() * b);
  const Eigen::VectorXd e2 = hermitian_eigenvalues(b * b.adjoint());
  const double top = std::max(e1.size() ? e1.cwiseAbs().maxCoeff() : 0.0,
                              e2.size() ? e2.cwiseAbs().maxCoeff() : 0.0);
  const double zero_cut = 1e-12 * std::max(top, 1e-300) * std::max<Eigen::Index>(b.rows(), b.cols());
  auto nonzero = [&](const Eigen::VectorXd& e) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < e.size(); ++i)
      if (std::abs(e[i]) > zero_cut) v.push_back(e[i]);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto n1 = nonzero(e1), n2 = nonzero(e2);
  if (n1.size() != n2.size()) return false;
  for (std::size_t i = 0; i < n1.size(); ++i)
    if (std::abs(n1[i] - n2[i]) > 1e-12 * top) return false;
  return count_above(e1, s) == count_above(e2, s);
}

bool check_pushnitski_bound(double s1, double s2, const Eigen::MatrixXcd& t1,
                            const Eigen::MatrixXcd& t2, CountSign sign) {
  require_positive(s1, "check_pushnitski_bound");
  require_positive(s2, "check_pushnitski_bound");
  const double lhs = mu_average_counting(s1 + s2, t1, t2, sign).value;
  const Eigen::VectorXd e1 = hermitian_eigenvalues(t1);
  const Eigen::VectorXd e2 = hermitian_eigenvalues(t2);
  const double n1 = static_cast<double>(sign == CountSign::Plus ? count_above(e1, s1)
                                                                : count_above(-e1, s1));
  const double trace_norm = e2.cwiseAbs().sum();
  // Allow for the jump-localisation error of the left side.
  return lhs <= n1 + trace_norm / (std::numbers::pi * s2) + 1e-9;
}

}  // namespace dssf
