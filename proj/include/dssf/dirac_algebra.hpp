#pragma once

#include <Eigen/Dense>

#include "dssf/common.hpp"

namespace dssf {

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

// Standard Dirac representation: beta = diag(1,1,-1,-1),
// alpha_j = [[0, sigma_j], [sigma_j, 0]].
struct DiracMatrices {
  Matrix4c alpha1;
  Matrix4c alpha2;
  Matrix4c alpha3;
  Matrix4c beta;
};

DiracMatrices dirac_matrices();

// Largest entry of all anticommutator defects {a_i,a_j}-2d_ij, {a_i,b}, b^2-I.
double anticommutation_residual(const DiracMatrices& d);

class HermitianMatrix4 {
 public:
  HermitianMatrix4() : m_(Matrix4c::Zero()) {}
  // Throws std::invalid_argument when m is not hermitian within tol.
  explicit HermitianMatrix4(const Matrix4c& m, double tol = 1e-12);

  const Matrix4c& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  bool operator==(const HermitianMatrix4& o) const { return m_ == o.m_; }

  Eigen::Vector4d eigenvalues() const;
  bool is_psd(double tol = 1e-12) const;
  // Principal square root of a PSD matrix.
  Matrix4c sqrt_psd() const;

 private:
  Matrix4c m_;
};

// The pattern [[v1,0,v3,0],[0,v2,0,conj v3],[conj v3,0,v2,0],[0,v3,0,v1]].
HermitianMatrix4 alpha12_commutant(double v1, double v2, cplx v3);

Matrix4c charge_conjugation_matrix();  // U_C = i beta alpha2

// U_C conj(V) U_C^*. The overall sign is left to the caller.
HermitianMatrix4 charge_conjugate_potential(const HermitianMatrix4& v);

struct CommutantCheck {
  bool valid = false;
  double commutator_residual = 0.0;  // max |[V,alpha1]|, |[V,alpha2]| entry
  double pattern_residual = 0.0;     // distance to the 4-parameter pattern
};

CommutantCheck validate_alpha12_commutant(const HermitianMatrix4& v,
                                          double tol = 1e-12);

}  // namespace dssf
