#pragma once

#include <vector>

#include "lfsys/core/linalg.hpp"

namespace lfsys {

/// The derivation L = ad_b acting on the abelian ideal. Caches the spectrum
/// because every regime and exponent computation reads it.
class OperatorL {
 public:
  OperatorL() = default;
  explicit OperatorL(Matrix m);

  static OperatorL zero(int n) { return OperatorL(Matrix::Zero(n, n)); }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  Matrix adjoint() const { return matrix_.transpose(); }
  const std::vector<Complex>& eigenvalues() const { return eigenvalues_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double trace() const { return trace_; }
  bool unimodular(double tol = 1e-9) const;
  bool is_diagonal() const;

  /// e^{uL}
  Matrix exp_scaled(double u) const;

 private:
  Matrix matrix_;
  std::vector<Complex> eigenvalues_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  double trace_ = 0.0;
};

/// Real logarithm of an integer lattice automorphism. Rejects matrices that
/// are not integral with determinant one, and matrices with eigenvalues on the
/// closed negative real axis (no real principal logarithm).
OperatorL mat_log_automorphism(const Matrix& a);

}  // namespace lfsys
