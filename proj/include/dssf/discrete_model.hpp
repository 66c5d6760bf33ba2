#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dssf/csv.hpp"
#include "dssf/kernels1d.hpp"
#include "dssf/landau.hpp"
#include "dssf/ssf.hpp"
#include "dssf/toeplitz.hpp"

namespace dssf {

// H0 truncated to L Landau levels, N Fourier modes on the periodic box [-X, X)
// and 4 spinor components. Index = spinor * L * N + level * N + grid point.
struct DiscreteH0 {
  double b0 = 1.0, m = 1.0, X = 1.0;
  int L = 2, N = 4;
  LadderModel ladder;
  std::vector<double> momenta;   // pi j / X, j = -N/2 .. N/2-1
  Eigen::MatrixXcd p3;           // F^* diag(p) F on the grid
  Eigen::MatrixXcd matrix;
  std::vector<bool> interior;    // false on the top ladder level

  Eigen::Index dim() const { return matrix.rows(); }
};

DiscreteH0 build_h0(double b0, double m, int L, int N, double X);

// Max-abs entry of H0^2 - diag(H- + P3^2 + m^2, H+ + ..., H- + ..., H+ + ...) with
// the exact H- = 2 b0 l and H+ = 2 b0 (l+1) on each level l.
struct SquareIdentity {
  double interior = 0.0;  // rows and columns below the top level
  double full = 0.0;
  double top = 0.0;       // entries touching the top level
};
// Throws CrossCheckError when the interior residual exceeds 1e-10 (relative to max(1, |H0^2|)).
SquareIdentity check_square_identity(const DiscreteH0& h0);

Eigen::VectorXd h0_eigenvalues(const DiscreteH0& h0);

// min |eigenvalue|; throws CrossCheckError when an eigenvalue falls inside (-m, m).
double check_gap(const DiscreteH0& h0, const Eigen::VectorXd& eigenvalues);
double check_gap(const DiscreteH0& h0);

// +-sqrt(2 b0 n + p^2 + m^2), n = 0..L-1, every grid momentum, each twice
// (the truncated top level supplies a second n = 0 pair). Ascending.
std::vector<double> fiber_spectrum(const DiscreteH0& h0);

// Max deviation of the sorted eigenvalues from the fiber prediction.
double fiber_deviation(const DiscreteH0& h0, const Eigen::VectorXd& eigenvalues);
// Max |lambda_i + lambda_{n-1-i}| over the sorted spectrum.
double symmetry_defect(const Eigen::VectorXd& eigenvalues);

struct TdivCount {
  double lambda = 0.0, s = 0.0;
  long long count_tdiv = 0;
  long long count_omega = 0;
  long long diff() const { return count_tdiv - count_omega; }
};

// n_+(s; T_div(lambda)) against n_+(s; omega_+(lambda)). T_div is the per-k block
// mu_k (V^{1/2} diag(l+m, 0, l-m, 0) V^{1/2}) (x) J with
// J_ij = sqrt(w_i g_i) e^{-kappa |x_i - x_j|} / (2 kappa) sqrt(w_j g_j), kappa = sqrt(m^2 - l^2).
TdivCount tdiv_vs_omega_count(double lambda, double m, const PotentialSpec& p, const ToeplitzModel& transverse_model,
                              const Grid1D& grid, double s);

CsvTable tdiv_table(const std::vector<TdivCount>& rows);

}  // namespace dssf
