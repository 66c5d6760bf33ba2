#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dssf/common.hpp"

namespace dssf {

// Magnetic field b = b0 + Laplacian(phi_tilde) with a radial, bounded phi_tilde.
// phi = b0 r^2 / 4 + phi_tilde(r).
class FieldSpec {
 public:
  using Radial = std::function<double(double)>;

  static FieldSpec constant(double b0);
  // phi_tilde is sampled on 10^4 points of [0, sample_radius] to obtain osc
  // and to check boundedness of the function and its first two derivatives.
  FieldSpec(double b0, Radial phi_tilde, std::string description = "custom",
            double sample_radius = 100.0);

  double b0() const { return b0_; }
  double osc() const { return osc_; }
  double phi_tilde(double r) const { return phi_tilde_ ? phi_tilde_(r) : 0.0; }
  double phi(double r) const { return 0.25 * b0_ * r * r + phi_tilde(r); }
  bool is_constant_field() const { return !phi_tilde_; }
  const std::string& description() const { return description_; }

 private:
  double b0_ = 1.0;
  Radial phi_tilde_;
  double osc_ = 0.0;
  std::string description_ = "constant";
};

double compute_zeta(const FieldSpec& field);

// Lowest-Landau-level radial functions r^k e^{-phi}, k = 0..K-1.
// log_norms[k] = (1/2) log int_0^inf r^{2k+1} e^{-2 phi(r)} dr.
struct LLLBasis {
  FieldSpec field = FieldSpec::constant(1.0);
  int K = 0;
  std::vector<double> log_norms;
  int gauss_points = 16;           // per panel
  std::vector<double> radius_max;  // upper end of the quadrature window per k

  // Radius beyond which r^{2k+1} e^{-2 phi} is below exp(-drop) of its peak,
  // including the worst case of the bounded perturbation.
  double search_radius(int k, double drop = 90.0) const;
};

LLLBasis build_lll_basis(const FieldSpec& field, int K);

// log int_0^inf r^{2k+1} e^{-2 phi(r)} dr (twice the log norm).
double log_lll_moment(const FieldSpec& field, int k, double* window_hi = nullptr);

// Closed form (1/2) log[(1/2)(2/b0)^{k+1} k!] valid for phi_tilde = 0.
double constant_field_log_norm(double b0, int k);

// Truncated ladder operators. `a` is the lower shift with entries
// a(k+1, k) = sqrt(2 b0 (k+1)); a* its adjoint, whose kernel is the lowest level.
struct LadderModel {
  double b0 = 1.0;
  int L = 2;
  Eigen::MatrixXd a;
  Eigen::MatrixXd a_dag;
  Eigen::MatrixXd h_minus;  // a a*
  Eigen::MatrixXd h_plus;   // a* a (top diagonal entry is a truncation artefact)

  // a* a - a a*, equal to 2 b0 on the first L-1 levels.
  Eigen::MatrixXd canonical_commutator() const { return h_plus - h_minus; }
};

LadderModel build_ladder(double b0, int L);

}  // namespace dssf
