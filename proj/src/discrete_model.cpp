#include "dssf/discrete_model.hpp"

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

// F^* diag(f(p_j)) F on the periodic grid x_a = -X + 2 X a / N.
Eigen::MatrixXcd fourier_multiplier(const std::vector<double>& p, double X, int N, double (*f)(double)) {
  const double h = 2.0 * X / N;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      cplx acc = 0.0;
      const double dx = (a - b) * h;
      for (double pj : p) acc += f(pj) * std::polar(1.0, pj * dx);
      out(a, b) = acc / static_cast<double>(N);
    }
  }
  return out;
}

}  // namespace

DiscreteH0 build_h0(double b0, double m, int L, int N, double X) {
  if (L < 1) throw std::invalid_argument("build_h0: L >= 1 is required");
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("build_h0: N must be even and >= 4");
  if (!(X > 0.0)) throw std::invalid_argument("build_h0: X must be positive");
  if (!(b0 > 0.0)) throw std::invalid_argument("build_h0: b0 must be positive");
  if (!(m >= 0.0)) throw std::invalid_argument("build_h0: m must be nonnegative");

  DiscreteH0 h;
  h.b0 = b0;
  h.m = m;
  h.X = X;
  h.L = L;
  h.N = N;
  h.ladder = build_ladder(b0, L);
  for (int j = -N / 2; j < N / 2; ++j) h.momenta.push_back(kPi * j / X);
  h.p3 = fourier_multiplier(h.momenta, X, N, [](double p) { return p; });

  const Eigen::Index LN = static_cast<Eigen::Index>(L) * N;
  const Eigen::MatrixXcd eyeN = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd eyeL = Eigen::MatrixXcd::Identity(L, L);
  auto kron = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const Eigen::MatrixXcd P = kron(eyeL, h.p3);
  const Eigen::MatrixXcd A = kron(h.ladder.a.cast<cplx>(), eyeN);
  const Eigen::MatrixXcd Ad = kron(h.ladder.a_dag.cast<cplx>(), eyeN);
  const Eigen::MatrixXcd M = m * Eigen::MatrixXcd::Identity(LN, LN);

  h.matrix = Eigen::MatrixXcd::Zero(4 * LN, 4 * LN);
  auto blk = [&](int r, int c) { return h.matrix.block(r * LN, c * LN, LN, LN); };
  blk(0, 0) = M;
  blk(0, 2) = P;
  blk(0, 3) = A;
  blk(1, 1) = M;
  blk(1, 2) = Ad;
  blk(1, 3) = -P;
  blk(2, 0) = P;
  blk(2, 1) = A;
  blk(2, 2) = -M;
  blk(3, 0) = Ad;
  blk(3, 1) = -P;
  blk(3, 3) = -M;

  h.interior.resize(static_cast<std::size_t>(4 * LN));
  for (Eigen::Index i = 0; i < 4 * LN; ++i) h.interior[static_cast<std::size_t>(i)] = (i % LN) / N < L - 1;
  return h;
}

SquareIdentity check_square_identity(const DiscreteH0& h) {
  const Eigen::MatrixXcd sq = h.matrix * h.matrix;
  const Eigen::MatrixXcd p2 = fourier_multiplier(h.momenta, h.X, h.N, [](double p) { return p * p; });
  const Eigen::Index LN = static_cast<Eigen::Index>(h.L) * h.N;
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4 * LN, 4 * LN);
  for (int s = 0; s < 4; ++s) {
    const bool plus = s == 1 || s == 3;  // H+ on the second and fourth components
    for (int l = 0; l < h.L; ++l) {
      const double level = 2.0 * h.b0 * (plus ? l + 1 : l);
      const Eigen::Index o = s * LN + static_cast<Eigen::Index>(l) * h.N;
      expected.block(o, o, h.N, h.N) = p2;
      expected.block(o, o, h.N, h.N).diagonal().array() += level + h.m * h.m;
    }
  }
  SquareIdentity r;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < sq.rows(); ++i) {
    for (Eigen::Index j = 0; j < sq.cols(); ++j) {
      const double d = std::abs(sq(i, j) - expected(i, j));
      scale = std::max(scale, std::abs(sq(i, j)));
      r.full = std::max(r.full, d);
      if (h.interior[static_cast<std::size_t>(i)] && h.interior[static_cast<std::size_t>(j)])
        r.interior = std::max(r.interior, d);
      else
        r.top = std::max(r.top, d);
    }
  }
  if (r.interior > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "check_square_identity: interior residual " << r.interior << " off the top level";
    throw CrossCheckError(msg.str());
  }
  return r;
}

Eigen::VectorXd h0_eigenvalues(const DiscreteH0& h) { return hermitian_eigenvalues(h.matrix); }

double check_gap(const DiscreteH0& h, const Eigen::VectorXd& eig) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eig.size(); ++i) gap = std::min(gap, std::abs(eig(i)));
  if (gap < h.m * (1.0 - 1e-10)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "check_gap: eigenvalue " << gap << " inside (-m, m), m = " << h.m;
    throw CrossCheckError(msg.str());
  }
  return gap;
}

double check_gap(const DiscreteH0& h) { return check_gap(h, h0_eigenvalues(h)); }

std::vector<double> fiber_spectrum(const DiscreteH0& h) {
  std::vector<double> out;
  for (double p : h.momenta)
    for (int n = 0; n < h.L; ++n) {
      const double e = std::sqrt(2.0 * h.b0 * n + p * p + h.m * h.m);
      out.insert(out.end(), {e, e, -e, -e});
    }
  std::sort(out.begin(), out.end());
  return out;
}

double fiber_deviation(const DiscreteH0& h, const Eigen::VectorXd& eig) {
  const auto pred = fiber_spectrum(h);
  if (pred.size() != static_cast<std::size_t>(eig.size()))
    throw std::invalid_argument("fiber_deviation: spectrum size mismatch");
  std::vector<double> e(eig.data(), eig.data() + eig.size());
  std::sort(e.begin(), e.end());
  double dev = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) dev = std::max(dev, std::abs(e[i] - pred[i]));
  return dev;
}

double symmetry_defect(const Eigen::VectorXd& eig) {
  std::vector<double> e(eig.data(), eig.data() + eig.size());
  std::sort(e.begin(), e.end());
  double d = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) d = std::max(d, std::abs(e[i] + e[e.size() - 1 - i]));
  return d;
}

TdivCount tdiv_vs_omega_count(double lambda, double m, const PotentialSpec& p, const ToeplitzModel& model,
                              const Grid1D& grid, double s) {
  if (!(m > 0.0) || !(std::abs(lambda) < m)) throw std::invalid_argument("tdiv_vs_omega_count: requires |lambda| < m");
  if (!(s > 0.0)) throw std::invalid_argument("tdiv_vs_omega_count: s must be positive");
  if (model.matrix.size() != 0)
    throw std::invalid_argument("tdiv_vs_omega_count: needs the radial Toeplitz model of the transverse profile");
  const long long N = grid.N;
  if (N > 2048) throw std::invalid_argument("tdiv_vs_omega_count: grid too large for a dense block (N <= 2048)");

  const double kappa = std::sqrt(m * m - lambda * lambda);
  std::vector<double> root(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) {
    const double w = (i == 0 || i == N - 1) ? 0.5 * grid.h() : grid.h();
    root[static_cast<std::size_t>(i)] = std::sqrt(w * p.longitudinal().eval(grid.node(i)));
  }
  Eigen::MatrixXd J(N, N);
  for (long long i = 0; i < N; ++i)
    for (long long j = 0; j < N; ++j)
      J(i, j) = root[static_cast<std::size_t>(i)] * root[static_cast<std::size_t>(j)] *
                std::exp(-kappa * std::abs(grid.node(i) - grid.node(j))) / (2.0 * kappa);

  const Matrix4c S = p.matrix_part().sqrt_psd();
  Eigen::Vector4cd d;
  d << lambda + m, 0.0, lambda - m, 0.0;
  const Matrix4c A4 = S * d.asDiagonal() * S;

  Eigen::MatrixXcd block(4 * N, 4 * N);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) block.block(a * N, b * N, N, N) = A4(a, b) * J.cast<cplx>();
  const Eigen::VectorXd eig = hermitian_eigenvalues(block);

  // n_+(s; mu_k e_j) summed over the positive block eigenvalues e_j.
  const double top = eig.size() ? eig.maxCoeff() : 0.0;
  TdivCount c;
  c.lambda = lambda;
  c.s = s;
  if (top > 0.0 && !model.spectrum.adequate_for(s / top))
    throw TruncationError("tdiv_vs_omega_count: transverse truncation floor is not below 1e-3 of s / |block|");
  for (Eigen::Index j = 0; j < eig.size(); ++j)
    if (eig(j) > 1e-14 * top) c.count_tdiv += static_cast<long long>(model.spectrum.n_plus(s / eig(j)));

  const WSpectra w = make_w_spectra(p, model);
  const double thr = omega_threshold(lambda, m, CountSign::Plus) * s;
  if (!w.plus.empty()) {
    if (!w.plus.adequate_for(thr))
      throw TruncationError("tdiv_vs_omega_count: transverse truncation floor is not below 1e-3 of the omega threshold");
    c.count_omega = static_cast<long long>(w.plus.n_plus(thr));
  }
  return c;
}

CsvTable tdiv_table(const std::vector<TdivCount>& rows) {
  CsvTable t;
  t.header = {"lambda", "s", "count_tdiv", "count_omega", "diff"};
  for (const auto& r : rows) t.add({r.lambda, r.s, r.count_tdiv, r.count_omega, r.diff()});
  return t;
}

}  // namespace dssf
