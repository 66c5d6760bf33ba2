#include "dssf/kernels1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "dssf/quadrature.hpp"

namespace dssf {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};
}  // namespace

Grid1D::Grid1D(double half_width, long long n) : X(half_width), N(n) {
  if (!(half_width > 0.0)) throw std::invalid_argument("Grid1D: half width must be positive");
  if (n < 2) throw std::invalid_argument("Grid1D: need at least two points");
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = node(i);
  return x;
}

cplx resolvent_kernel(double lambda, double x3) {
  if (lambda == 0.0) throw std::invalid_argument("resolvent_kernel: lambda = 0 is the critical value");
  const double ax = std::abs(x3);
  if (lambda < 0.0) {
    const double q = std::sqrt(-lambda);
    return std::exp(-q * ax) / (2.0 * q);
  }
  const double q = std::sqrt(lambda);
  return kI * std::polar(1.0, q * ax) / (2.0 * q);
}

double weighted_mass(double nu) {
  if (!(nu > 1.0)) throw std::invalid_argument("weighted_mass: nu must exceed 1");
  return std::sqrt(kPi) * std::exp(std::lgamma(0.5 * (nu - 1.0)) - std::lgamma(0.5 * nu));
}

namespace {

// int_a^b f with Gauss-Legendre on subpanels no wider than the local scale of f.
template <class F>
double panel_integral(const F& f, double a, double b) {
  const GaussRule& rule = gauss_legendre(24);
  const double scale = std::max(1.0, 0.25 * std::min(std::abs(a), std::abs(b)));
  const int sub = std::max(1, static_cast<int>(std::ceil((b - a) / scale)));
  const double w = (b - a) / sub;
  double acc = 0.0;
  for (int s = 0; s < sub; ++s) {
    const double c = a + (s + 0.5) * w;
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) part += rule.weights[q] * f(c + 0.5 * w * rule.nodes[q]);
    acc += 0.5 * w * part;
  }
  return acc;
}

// Sum of an alternating series from its leading terms by repeated averaging
// of partial sums (Euler transform).
double euler_sum(const std::vector<double>& terms, std::size_t direct) {
  std::vector<double> partial;
  double s = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    s += terms[i];
    if (i + 1 >= direct) partial.push_back(s);
  }
  while (partial.size() > 1) {
    for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    partial.pop_back();
  }
  return partial.front();
}

}  // namespace

double weighted_cosine_integral(double nu, double xi) {
  if (!(nu > 1.0)) throw std::invalid_argument("weighted_cosine_integral: nu must exceed 1");
  xi = std::abs(xi);
  if (xi == 0.0) return weighted_mass(nu);
  auto f = [&](double x) { return std::pow(1.0 + x * x, -0.5 * nu) * std::cos(xi * x); };
  // Panels between consecutive zeros of cos(xi x): [0, pi/(2 xi)], then half periods.
  const double half = kPi / xi;
  const std::size_t nterms = 96, direct = 32;
  std::vector<double> terms(nterms);
  double a = 0.0, b = 0.5 * half;
  for (std::size_t j = 0; j < nterms; ++j) {
    terms[j] = panel_integral(f, a, b);
    a = b;
    b += half;
  }
  const double full = euler_sum(terms, direct);
  std::vector<double> shorter(terms.begin(), terms.end() - 16);
  const double coarse = euler_sum(shorter, direct);
  if (std::abs(full - coarse) > 1e-11 * std::max(1.0, std::abs(full)))
    throw ConvergenceError("weighted_cosine_integral: accelerated panel sum did not settle (nu=" +
                           std::to_string(nu) + ", xi=" + std::to_string(xi) + ")");
  return 2.0 * full;
}

double RankTwoImS::schatten(double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten: p must be >= 1");
  return std::pow(2.0, 1.0 / p) * norm_u * norm_v;
}

RankTwoImS make_rank_two_im_s(double lambda, double m, double nu3) {
  if (!(m > 0.0)) throw std::invalid_argument("make_rank_two_im_s: m must be positive");
  if (!(std::abs(lambda) > m)) throw std::invalid_argument("make_rank_two_im_s: need |lambda| > m");
  if (!(nu3 > 1.0)) throw std::invalid_argument("make_rank_two_im_s: nu3 must exceed 1");
  RankTwoImS r;
  r.lambda = lambda;
  r.m = m;
  r.nu3 = nu3;
  r.k = std::sqrt(lambda * lambda - m * m);
  const double mass = weighted_mass(nu3);
  const double osc = weighted_cosine_integral(nu3, 2.0 * r.k);
  // sin^2 = (1 - cos 2kx)/2, cos^2 = (1 + cos 2kx)/2; v carries the factor 1/2.
  r.norm_u = std::sqrt(0.5 * (mass - osc));
  r.norm_v = 0.5 * std::sqrt(0.5 * (mass + osc));

  // <v, u> = (i/4) int <x>^{-nu} sin(2kx) dx over a symmetric window.
  const double half = kPi / r.k;
  const int periods = 200;
  double acc = 0.0;
  auto g = [&](double x) { return std::pow(1.0 + x * x, -0.5 * nu3) * std::sin(2.0 * r.k * x); };
  for (int j = -periods; j < periods; ++j) acc += panel_integral(g, j * 0.5 * half, (j + 1) * 0.5 * half);
  r.inner_vu = 0.25 * std::abs(acc);
  return r;
}

double im_s_schatten(double lambda, double m, double nu3, double p) {
  return make_rank_two_im_s(lambda, m, nu3).schatten(p);
}

double GridSingularValues::schatten(double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten: p must be >= 1");
  return std::pow(std::pow(sigma1, p) + std::pow(sigma2, p), 1.0 / p);
}

GridSingularValues im_s_grid_singular_values(double lambda, double m, double nu3, const Grid1D& grid) {
  if (!(std::abs(lambda) > m)) throw std::invalid_argument("im_s_grid: need |lambda| > m");
  const double k = std::sqrt(lambda * lambda - m * m);
  const double h = grid.h();
  const long long N = grid.N;
  // Chunked sums keep rounding small and make the result independent of threads.
  const long long chunk = 1 << 16;
  const long long nchunks = (N + chunk - 1) / chunk;
  std::vector<double> saa(nchunks), sbb(nchunks), sab(nchunks);
  parallel_for(static_cast<std::size_t>(nchunks), [&](std::size_t c) {
    const long long lo = static_cast<long long>(c) * chunk, hi = std::min(N, lo + chunk);
    double aa = 0.0, bb = 0.0, ab = 0.0;
    for (long long i = lo; i < hi; ++i) {
      const double x = grid.node(i);
      const double wt = (i == 0 || i == N - 1) ? 0.5 * h : h;
      const double w2 = std::pow(1.0 + x * x, -0.5 * nu3) * wt;
      const double s = std::sin(k * x), co = std::cos(k * x);
      aa += w2 * s * s;
      bb += w2 * co * co;
      ab += w2 * s * co;
    }
    saa[c] = aa;
    sbb[c] = bb;
    sab[c] = ab;
  });
  double Saa = 0.0, Sbb = 0.0, Sab = 0.0;
  for (long long c = 0; c < nchunks; ++c) {
    Saa += saa[c];
    Sbb += sbb[c];
    Sab += sab[c];
  }
  // a~ = (|a|, 0), b~ = (beta1, beta2) in an orthonormal basis of span{a, b}.
  const double na = std::sqrt(Saa);
  const double beta1 = Sab / na;
  const double beta2 = std::sqrt(std::max(0.0, Sbb - beta1 * beta1));
  Eigen::Vector2cd av(na, 0.0), bv(beta1, beta2);
  Eigen::Matrix2cd core = 0.5 * kI * (av * bv.transpose() - bv * av.transpose());
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(core);
  GridSingularValues out;
  out.sigma1 = svd.singularValues()[0];
  out.sigma2 = svd.singularValues()[1];
  return out;
}

double im_s_schatten_grid(double lambda, double m, double nu3, double p, const Grid1D& grid) {
  return im_s_grid_singular_values(lambda, m, nu3, grid).schatten(p);
}

cplx s_kernel(cplx z, double m, double nu3, double x3, double x3p) {
  const double d = x3 - x3p;
  if (d == 0.0) return 0.0;
  cplx q = std::sqrt(z * z - m * m);
  if (q.imag() < 0.0) q = -q;
  if (q.imag() == 0.0) {
    if (z.imag() == 0.0 && std::abs(z.real()) <= m)
      q = kI * std::sqrt(m * m - z.real() * z.real());
    else if (z.real() < 0.0)
      q = -std::abs(q.real());
    else
      q = std::abs(q.real());
  }
  const double w = std::pow(1.0 + x3 * x3, -0.25 * nu3) * std::pow(1.0 + x3p * x3p, -0.25 * nu3);
  const double sg = d > 0.0 ? 1.0 : -1.0;
  return 0.5 * kI * w * sg * std::exp(kI * q * std::abs(d));
}

namespace {

double hs_squared(double kappa, double nu_prime, const Grid1D& g) {
  const long long N = g.N;
  const double h = g.h();
  std::vector<double> wt(static_cast<std::size_t>(N)), dd(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) {
    const double x = g.node(i);
    const double tw = (i == 0 || i == N - 1) ? 0.5 * h : h;
    wt[i] = tw * std::pow(1.0 + x * x, -0.5 * nu_prime);
    const double d = static_cast<double>(i) * h;
    // |d|/2 - (1 - e^{-kappa d})/(2 kappa)
    const double diff = 0.5 * d + std::expm1(-kappa * d) / (2.0 * kappa);
    dd[i] = diff * diff;
  }
  std::vector<double> rows(static_cast<std::size_t>(N));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(N); ++j) acc += wt[j] * dd[j - i];
    rows[i] = wt[i] * acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return 2.0 * total;  // diagonal terms vanish (D(0) = 0)
}

}  // namespace

HsDistance j_kernel_hs_distance(double lambda, double m, double nu_prime, const Grid1D& grid) {
  if (!(std::abs(lambda) < m)) throw std::invalid_argument("j_kernel_hs_distance: need |lambda| < m");
  if (!(nu_prime > 3.0)) throw std::invalid_argument("j_kernel_hs_distance: need nu' > 3");
  const double kappa = std::sqrt(m * m - lambda * lambda);
  HsDistance out;
  out.value = std::sqrt(hs_squared(kappa, nu_prime, grid));
  const Grid1D fine(grid.X, 2 * grid.N - 1);
  out.refined = std::sqrt(hs_squared(kappa, nu_prime, fine));
  out.rel_change = std::abs(out.refined - out.value) / std::max(out.refined, 1e-300);
  if (out.rel_change > 1e-6) {
    std::ostringstream msg;
    msg << "j_kernel_hs_distance: grid too coarse (N=" << grid.N << " vs " << fine.N
        << " differ by " << out.rel_change << " relatively)";
    throw ConvergenceError(msg.str());
  }
  return out;
}

CsvTable kernel_norm_table(const std::vector<double>& lambdas, double m, double nu3,
                           const std::vector<int>& ps, const Grid1D& grid) {
  CsvTable t;
  t.header = {"lambda", "p", "norm_closed_form", "norm_grid"};
  for (double l : lambdas) {
    const RankTwoImS closed = make_rank_two_im_s(l, m, nu3);
    const GridSingularValues sv = im_s_grid_singular_values(l, m, nu3, grid);
    for (int p : ps) t.add({l, static_cast<long long>(p), closed.schatten(p), sv.schatten(p)});
  }
  return t;
}

}  // namespace dssf
