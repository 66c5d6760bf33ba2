#pragma once

#include <cmath>
#include <vector>

#include "dssf/common.hpp"
#include "dssf/csv.hpp"

namespace dssf {

// Uniform grid on [-X, X] with N points.
struct Grid1D {
  double X = 200.0;
  long long N = 1 << 14;

  Grid1D() = default;
  Grid1D(double half_width, long long n);
  double h() const { return 2.0 * X / static_cast<double>(N - 1); }
  double node(long long i) const { return -X + static_cast<double>(i) * h(); }
  std::vector<double> nodes() const;
};

// <x> = sqrt(1 + x^2)
inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

// Boundary value of the 1-D resolvent kernel: e^{-sqrt(-l)|x|}/(2 sqrt(-l)) for
// l < 0 and the outgoing i e^{i sqrt(l)|x|}/(2 sqrt(l)) for l > 0.
cplx resolvent_kernel(double lambda, double x3);

// int_R <x>^{-nu} cos(xi x) dx for nu > 1, xi >= 0, by half-period panels and
// accelerated summation of the alternating panel series.
double weighted_cosine_integral(double nu, double xi);
// int_R <x>^{-nu} dx
double weighted_mass(double nu);

// u(x) = <x>^{-nu/2} sin(k x), v(x) = -(i/2) <x>^{-nu/2} cos(k x), k = sqrt(l^2 - m^2).
// Im S_lambda is the hermitian rank-two operator with eigenvalues +-||u|| ||v||.
struct RankTwoImS {
  double lambda = 0.0, m = 1.0, nu3 = 2.0;
  double k = 0.0;
  double norm_u = 0.0, norm_v = 0.0;
  double inner_vu = 0.0;  // |<v, u>| by symmetric quadrature

  double schatten(double p) const;  // 2^{1/p} ||u|| ||v||
};

RankTwoImS make_rank_two_im_s(double lambda, double m, double nu3);
double im_s_schatten(double lambda, double m, double nu3, double p);

// Singular values of the discretized kernel (i/2) w(x) w(x') sin(k(x - x')) on
// the grid (trapezoid weights), obtained from streamed Gram sums and a 2x2 core SVD.
struct GridSingularValues {
  double sigma1 = 0.0, sigma2 = 0.0;
  double schatten(double p) const;
};
GridSingularValues im_s_grid_singular_values(double lambda, double m, double nu3, const Grid1D& grid);
double im_s_schatten_grid(double lambda, double m, double nu3, double p, const Grid1D& grid);

// (i/2) <x>^{-nu/2} sgn(x - x') e^{i q |x - x'|} <x'>^{-nu/2}, Im q > 0
// (q = sgn(Re z) sqrt(z^2 - m^2) on the real axis outside the gap).
cplx s_kernel(cplx z, double m, double nu3, double x3, double x3p);

// Hilbert-Schmidt norm of J^(m) - J^(lambda) for |lambda| < m; throws
// ConvergenceError when the N and 2N grids disagree by more than 1e-6.
struct HsDistance {
  double value = 0.0;
  double refined = 0.0;
  double rel_change = 0.0;
};
HsDistance j_kernel_hs_distance(double lambda, double m, double nu_prime, const Grid1D& grid);

CsvTable kernel_norm_table(const std::vector<double>& lambdas, double m, double nu3,
                           const std::vector<int>& ps, const Grid1D& grid);

}  // namespace dssf
