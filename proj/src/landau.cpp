#include "dssf/landau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dssf/quadrature.hpp"

namespace dssf {

FieldSpec FieldSpec::constant(double b0) { return FieldSpec(b0, nullptr, "constant"); }

FieldSpec::FieldSpec(double b0, Radial phi_tilde, std::string description, double sample_radius)
    : b0_(b0), phi_tilde_(std::move(phi_tilde)), description_(std::move(description)) {
  if (!(b0 > 0.0) || !std::isfinite(b0))
    throw std::invalid_argument("FieldSpec: b0 must be positive and finite");
  if (!phi_tilde_) return;
  if (!(sample_radius > 0.0)) throw std::invalid_argument("FieldSpec: sample radius must be positive");

  const int n = 10000;
  const double h = sample_radius / (n - 1);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = phi_tilde_(i * h);
    if (!std::isfinite(v[i])) throw std::invalid_argument("FieldSpec: phi_tilde is not finite");
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  // Bounded first and second differences; a loose ceiling catches blow-ups.
  for (int i = 1; i + 1 < n; ++i) {
    const double d1 = (v[i + 1] - v[i - 1]) / (2 * h);
    const double d2 = (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h);
    if (!std::isfinite(d1) || !std::isfinite(d2) || std::abs(d1) > 1e8 || std::abs(d2) > 1e8)
      throw std::invalid_argument("FieldSpec: phi_tilde derivatives are not bounded");
  }
  // Growth beyond the sampled range (a slowly increasing phi_tilde passes the
  // difference test but not this one).
  const double ceiling = 10.0 * (std::max(std::abs(lo), std::abs(hi)) + 1.0);
  for (double f : {10.0, 100.0, 1000.0}) {
    const double far = phi_tilde_(f * sample_radius);
    if (!std::isfinite(far) || std::abs(far) > ceiling)
      throw std::invalid_argument("FieldSpec: phi_tilde is not bounded beyond the sampled range");
  }
  osc_ = hi - lo;
}

double compute_zeta(const FieldSpec& field) {
  return 2.0 * field.b0() * std::exp(-2.0 * field.osc());
}

double constant_field_log_norm(double b0, int k) {
  return 0.5 * (std::log(0.5) + (k + 1) * std::log(2.0 / b0) + std::lgamma(k + 1.0));
}

namespace {

double search_radius_for(double b0, double osc, int k, double drop) {
  const double r0 = std::sqrt((2.0 * k + 1.0) / b0);
  auto g0 = [&](double r) { return (2.0 * k + 1.0) * std::log(r) - 0.5 * b0 * r * r; };
  const double top = g0(r0);
  const double step = 1.0 / std::sqrt(b0);
  double r = r0 + step;
  while (g0(r) > top - drop - 2.0 * osc) r += step;
  return r;
}

}  // namespace

double LLLBasis::search_radius(int k, double drop) const {
  return search_radius_for(field.b0(), field.osc(), k, drop);
}

double log_lll_moment(const FieldSpec& field, int k, double* window_hi) {
  const double rmax = search_radius_for(field.b0(), field.osc(), k, 90.0);
  if (window_hi) *window_hi = rmax;
  const double p = 2.0 * k + 1.0;
  auto log_f = [&](double r) {
    if (r <= 0.0) return -std::numeric_limits<double>::infinity();
    return p * std::log(r) - 2.0 * field.phi(r);
  };
  return log_integrate_peaked(log_f, 0.0, rmax).log_value;
}

LLLBasis build_lll_basis(const FieldSpec& field, int K) {
  if (K < 1) throw std::invalid_argument("build_lll_basis: K must be at least 1");
  LLLBasis basis;
  basis.field = field;
  basis.K = K;
  basis.log_norms.resize(K);
  basis.radius_max.resize(K);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t k) {
    double hi = 0.0;
    basis.log_norms[k] = 0.5 * log_lll_moment(field, static_cast<int>(k), &hi);
    basis.radius_max[k] = hi;
  });
  return basis;
}

LadderModel build_ladder(double b0, int L) {
  if (!(b0 > 0.0)) throw std::invalid_argument("build_ladder: b0 must be positive");
  if (L < 1) throw std::invalid_argument("build_ladder: L must be at least 1");
  LadderModel m;
  m.b0 = b0;
  m.L = L;
  m.a = Eigen::MatrixXd::Zero(L, L);
  for (int k = 0; k + 1 < L; ++k) m.a(k + 1, k) = std::sqrt(2.0 * b0 * (k + 1));
  m.a_dag = m.a.transpose();
  m.h_minus = m.a * m.a_dag;
  m.h_plus = m.a_dag * m.a;
  return m;
}

}  // namespace dssf
