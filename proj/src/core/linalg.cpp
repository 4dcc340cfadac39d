#include "lfsys/core/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "lfsys/core/errors.hpp"

namespace lfsys {

bool all_finite(const Matrix& a) { return a.allFinite(); }

namespace {

// Degree-13 Padé coefficients and the 1-norm bound below which it reaches
// double precision without squaring.
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

double norm1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

Matrix mat_exp(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("mat_exp: matrix is not square");
  if (!a.allFinite()) throw InvalidInput("mat_exp: non-finite entry");
  const auto n = a.rows();
  if (n == 0) return a;

  const double nrm = norm1(a);
  if (nrm == 0.0) return Matrix::Identity(n, n);
  int squarings = 0;
  if (nrm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
  const Matrix as = a / std::ldexp(1.0, squarings);

  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kPade13;

  const Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix mat_sqrt(const Matrix& a) {
  const auto n = a.rows();
  Matrix y = a;
  Matrix z = Matrix::Identity(n, n);
  for (int it = 0; it < 100; ++it) {
    const Matrix y_inv = y.partialPivLu().inverse();
    const Matrix z_inv = z.partialPivLu().inverse();
    Matrix y_next = 0.5 * (y + z_inv);
    z = 0.5 * (z + y_inv);
    const double change = (y_next - y).norm();
    y = std::move(y_next);
    if (!y.allFinite()) break;
    if (change <= 1e-15 * std::max(1.0, y.norm())) return y;
  }
  if (!y.allFinite()) throw Unsupported("mat_sqrt: iteration diverged");
  return y;
}

Matrix mat_log(const Matrix& a) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix x = a;
  int roots = 0;
  while ((x - id).norm() > 0.25) {
    if (roots > 60) throw Unsupported("mat_log: square-root scaling did not converge");
    x = mat_sqrt(x);
    ++roots;
  }
  // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}, summed over odd powers.
  const Matrix z = (x + id).partialPivLu().solve(x - id);
  const Matrix z2 = z * z;
  Matrix term = z;
  Matrix sum = z;
  for (int k = 3; k < 200; k += 2) {
    term = term * z2;
    const Matrix add = term / static_cast<double>(k);
    sum += add;
    if (add.norm() <= 1e-18 * std::max(1.0, sum.norm())) break;
  }
  return std::ldexp(2.0, roots) * sum;
}

std::vector<Complex> sorted_eigenvalues(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw InvalidInput("eigenvalue computation failed");
  std::vector<Complex> ev(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const Complex& l, const Complex& r) {
    if (l.real() != r.real()) return l.real() < r.real();
    return l.imag() < r.imag();
  });
  return ev;
}

}  // namespace lfsys
