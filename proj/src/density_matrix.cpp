#include "lambda_cpt/density_matrix.hpp"

#include <cmath>

namespace lambda_cpt {

namespace {

Eigen::Matrix<cplx, 9, 1> vec(const Matrix3c& m) {
  Eigen::Matrix<cplx, 9, 1> v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
  return v;
}

Matrix3c unvec(const Eigen::Matrix<cplx, 9, 1>& v) {
  Matrix3c m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
  return m;
}

}  // namespace

Vector3c ground_state(const Spinor& nuclear) { return Vector3c(nuclear(0), nuclear(1), 0.0); }

DensityMatrix::DensityMatrix() : m_(Matrix3c::Zero()) {
  m_(up, up) = 0.5;
  m_(down, down) = 0.5;
}

DensityMatrix DensityMatrix::from_matrix(const Matrix3c& m) {
  DensityMatrix rho(m, Unchecked{});
  if (rho.hermiticity_error() > 1e-10) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > 1e-10) throw InvalidArgument("density matrix trace is not 1");
  if (rho.min_eigenvalue() < -1e-8) throw InvalidArgument("density matrix is not positive semidefinite");
  return rho;
}

DensityMatrix DensityMatrix::pure(const Vector3c& state) {
  const double norm = state.norm();
  if (!(norm > 0.0)) throw InvalidArgument("pure state vector must be nonzero");
  const Vector3c s = state / norm;
  return DensityMatrix(s * s.adjoint(), Unchecked{});
}

double DensityMatrix::population(const Vector3c& state) const {
  return (state.adjoint() * m_ * state)(0, 0).real();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix3c h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Superoperator Superoperator::conjugation(const Matrix3c& u) {
  Matrix m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) m(3 * i + j, 3 * k + l) = u(i, k) * std::conj(u(j, l));
  return Superoperator(m);
}

Superoperator Superoperator::lindbladian(const Matrix3c& h, std::span<const Matrix3c> jumps) {
  Matrix3c anticomm = Matrix3c::Zero();
  for (const auto& l : jumps) anticomm += l.adjoint() * l;

  Matrix m;
  for (int k = 0; k < 9; ++k) {
    Matrix3c basis = Matrix3c::Zero();
    basis(k / 3, k % 3) = 1.0;
    Matrix3c out = -I * (h * basis - basis * h) - 0.5 * (anticomm * basis + basis * anticomm);
    for (const auto& l : jumps) out += l * basis * l.adjoint();
    m.col(k) = vec(out);
  }
  return Superoperator(m);
}

Matrix3c Superoperator::apply(const Matrix3c& m) const { return unvec(m_ * vec(m)); }

DensityMatrix Superoperator::apply(const DensityMatrix& rho) const {
  return DensityMatrix(apply(rho.m_), DensityMatrix::Unchecked{});
}

Superoperator Superoperator::power(std::uint64_t n) const {
  Matrix result = Matrix::Identity();
  Matrix base = m_;
  while (n > 0) {
    if (n & 1U) result = base * result;
    base = base * base;
    n >>= 1U;
  }
  return Superoperator(result);
}

}  // namespace lambda_cpt
