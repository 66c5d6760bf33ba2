#include "dssf/dirac_algebra.hpp"

#include <algorithm>
#include <stdexcept>

namespace dssf {

namespace {

const cplx I1{0.0, 1.0};

Matrix4c block_offdiag(const Eigen::Matrix2cd& s) {
  Matrix4c m = Matrix4c::Zero();
  m.block<2, 2>(0, 2) = s;
  m.block<2, 2>(2, 0) = s;
  return m;
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

DiracMatrices dirac_matrices() {
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I1, I1, 0;
  s3 << 1, 0, 0, -1;
  DiracMatrices d;
  d.alpha1 = block_offdiag(s1);
  d.alpha2 = block_offdiag(s2);
  d.alpha3 = block_offdiag(s3);
  d.beta = Matrix4c::Zero();
  d.beta.diagonal() << 1, 1, -1, -1;
  return d;
}

double anticommutation_residual(const DiracMatrices& d) {
  const Matrix4c* a[3] = {&d.alpha1, &d.alpha2, &d.alpha3};
  const Matrix4c id = Matrix4c::Identity();
  double r = max_abs(d.beta * d.beta - id);
  for (int i = 0; i < 3; ++i) {
    r = std::max(r, max_abs(*a[i] * d.beta + d.beta * *a[i]));
    for (int j = 0; j < 3; ++j) {
      Matrix4c ac = *a[i] * *a[j] + *a[j] * *a[i];
      if (i == j) ac -= 2.0 * id;
      r = std::max(r, max_abs(ac));
    }
  }
  return r;
}

HermitianMatrix4::HermitianMatrix4(const Matrix4c& m, double tol) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("HermitianMatrix4: non-finite entry");
  const double defect = max_abs(m - m.adjoint());
  if (defect > tol * std::max(1.0, max_abs(m)))
    throw std::invalid_argument("HermitianMatrix4: matrix is not hermitian (defect " +
                                std::to_string(defect) + ")");
  m_ = 0.5 * (m + m.adjoint());
}

Eigen::Vector4d HermitianMatrix4::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

bool HermitianMatrix4::is_psd(double tol) const {
  return eigenvalues().minCoeff() >= -tol * std::max(1.0, max_abs(m_));
}

Matrix4c HermitianMatrix4::sqrt_psd() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

HermitianMatrix4 alpha12_commutant(double v1, double v2, cplx v3) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = v1;
  m(3, 3) = v1;
  m(1, 1) = v2;
  m(2, 2) = v2;
  m(0, 2) = v3;
  m(2, 0) = std::conj(v3);
  m(1, 3) = std::conj(v3);
  m(3, 1) = v3;
  return HermitianMatrix4(m);
}

Matrix4c charge_conjugation_matrix() {
  const DiracMatrices d = dirac_matrices();
  return I1 * d.beta * d.alpha2;
}

HermitianMatrix4 charge_conjugate_potential(const HermitianMatrix4& v) {
  const Matrix4c uc = charge_conjugation_matrix();
  return HermitianMatrix4(uc * v.matrix().conjugate() * uc.adjoint());
}

CommutantCheck validate_alpha12_commutant(const HermitianMatrix4& v, double tol) {
  const DiracMatrices d = dirac_matrices();
  const Matrix4c& m = v.matrix();
  CommutantCheck c;
  c.commutator_residual = std::max(max_abs(m * d.alpha1 - d.alpha1 * m),
                                   max_abs(m * d.alpha2 - d.alpha2 * m));

  // Project onto the pattern and measure what is left over.
  const double v1 = 0.5 * (m(0, 0).real() + m(3, 3).real());
  const double v2 = 0.5 * (m(1, 1).real() + m(2, 2).real());
  const cplx v3 = 0.5 * (m(0, 2) + std::conj(m(1, 3)));
  c.pattern_residual = max_abs(m - alpha12_commutant(v1, v2, v3).matrix());

  const double scale = std::max(1.0, max_abs(m));
  const bool commutes = c.commutator_residual <= tol * scale;
  const bool matches = c.pattern_residual <= tol * scale;
  if (commutes != matches)
    throw std::logic_error("validate_alpha12_commutant: commutator and pattern verdicts disagree");
  c.valid = commutes;
  return c;
}

}  // namespace dssf
