#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace lfsys {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using Complex = std::complex<double>;

bool all_finite(const Matrix& a);

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant. Throws InvalidInput on non-finite entries.
Matrix mat_exp(const Matrix& a);

/// Principal square root by the Denman-Beavers iteration. The matrix must
/// have no eigenvalues on the closed negative real axis.
Matrix mat_sqrt(const Matrix& a);

/// Principal logarithm by inverse scaling and squaring. Same spectral
/// condition as mat_sqrt.
Matrix mat_log(const Matrix& a);

/// Eigenvalues sorted by (real part, imaginary part).
std::vector<Complex> sorted_eigenvalues(const Matrix& a);

}  // namespace lfsys
