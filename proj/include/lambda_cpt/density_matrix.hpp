#pragma once

#include <cstdint>
#include <span>

#include "lambda_cpt/common.hpp"

namespace lambda_cpt {

using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

/// Basis ordering of the Λ-system: |↑> = |0_e,↑>, |↓> = |0_e,↓>, |−> = |−1_e,−>.
enum Level : int { up = 0, down = 1, excited = 2 };

/// Embeds a ground-manifold nuclear spinor as a 3-level state vector.
Vector3c ground_state(const Spinor& nuclear);

class DensityMatrix {
 public:
  /// Thermal nuclear spin in m_s = 0: diag(½, ½, 0).
  DensityMatrix();

  /// Validates Hermiticity, unit trace and positivity (tolerances 1e-10 / 1e-8).
  static DensityMatrix from_matrix(const Matrix3c& m);
  static DensityMatrix pure(const Vector3c& state);
  static DensityMatrix thermal_ground() { return DensityMatrix(); }

  const Matrix3c& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  double population(Level level) const { return m_(level, level).real(); }
  double population(const Vector3c& state) const;
  double trace() const { return m_.trace().real(); }
  double purity() const { return (m_ * m_).trace().real(); }
  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const;

 private:
  struct Unchecked {};
  DensityMatrix(const Matrix3c& m, Unchecked) : m_(m) {}
  friend class Superoperator;

  Matrix3c m_;
};

/// Linear map on 3×3 matrices, stored on vec(ρ) with index 3·i + j.
class Superoperator {
 public:
  using Matrix = Eigen::Matrix<cplx, 9, 9>;

  Superoperator() : m_(Matrix::Identity()) {}
  explicit Superoperator(const Matrix& m) : m_(m) {}

  static Superoperator identity() { return Superoperator(); }
  /// ρ → U ρ U†
  static Superoperator conjugation(const Matrix3c& unitary);
  /// Generator −i[H,·] + Σ (L·L† − ½{L†L,·}).
  static Superoperator lindbladian(const Matrix3c& hamiltonian, std::span<const Matrix3c> jumps);

  const Matrix& matrix() const { return m_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  Matrix3c apply(const Matrix3c& m) const;

  /// this ∘ other (other acts first).
  Superoperator operator*(const Superoperator& other) const { return Superoperator(m_ * other.m_); }

  Superoperator power(std::uint64_t n) const;

 private:
  Matrix m_;
};

}  // namespace lambda_cpt
