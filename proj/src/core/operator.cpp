#include "lfsys/core/operator.hpp"

#include <algorithm>
#include <cmath>

#include "lfsys/core/errors.hpp"

namespace lfsys {

OperatorL::OperatorL(Matrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols())
    throw InvalidInput("OperatorL: matrix must be square with n >= 1");
  if (!matrix_.allFinite()) throw InvalidInput("OperatorL: non-finite entry");
  eigenvalues_ = sorted_eigenvalues(matrix_);
  r_min_ = eigenvalues_.front().real();
  r_max_ = eigenvalues_.back().real();
  trace_ = matrix_.trace();
}

bool OperatorL::unimodular(double tol) const { return std::abs(trace_) <= tol; }

bool OperatorL::is_diagonal() const {
  const Matrix off = matrix_ - Matrix(matrix_.diagonal().asDiagonal());
  return off.cwiseAbs().maxCoeff() == 0.0;
}

Matrix OperatorL::exp_scaled(double u) const { return mat_exp(u * matrix_); }

OperatorL mat_log_automorphism(const Matrix& a) {
  if (a.rows() < 1 || a.rows() != a.cols())
    throw InvalidInput("mat_log_automorphism: matrix must be square");
  if (!a.allFinite()) throw InvalidInput("mat_log_automorphism: non-finite entry");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] != std::round(a.data()[i]))
      throw Unsupported("mat_log_automorphism: entries must be integers");
  }
  const double det = a.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-9)
    throw Unsupported("mat_log_automorphism: |det A| must be 1");
  if (det < 0.0)
    throw Unsupported("mat_log_automorphism: det A = -1 has no real logarithm (det e^L > 0)");
  for (const auto& ev : sorted_eigenvalues(a)) {
    if (std::abs(ev.imag()) <= 1e-12 * std::max(1.0, std::abs(ev)) && ev.real() <= 0.0)
      throw Unsupported("mat_log_automorphism: eigenvalue on the closed negative real axis");
  }
  return OperatorL(mat_log(a));
}

}  // namespace lfsys
