#pragma once

// Test-side reference computations, written independently of the library's
// numerics: a truncated power series for e^A and a classical fixed-step RK4.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "lfsys/core/types.hpp"

namespace lfsys::oracle {

/// e^A by the power series in long double, after scaling by 2^s.
inline Matrix series_exp(const Matrix& a) {
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (std::ldexp(norm, -s) > 0.25) ++s;
  LMat x = a.cast<long double>() * std::ldexp(1.0L, -s);
  LMat term = LMat::Identity(a.rows(), a.cols());
  LMat sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * x / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum.cast<double>();
}

using Field = std::function<Vector(const Vector&)>;

inline Vector rk4(const Field& f, Vector y, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = f(y);
    const Vector k2 = f(y + 0.5 * h * k1);
    const Vector k3 = f(y + 0.5 * h * k2);
    const Vector k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

/// The L-F equations with linear F, written out directly on [w, u, xi, eta].
inline Field lf_field(const Matrix& l, const Matrix& f) {
  return [l, f](const Vector& y) {
    const int n = static_cast<int>(l.rows());
    const Vector xi = y.segment(n + 1, n);
    const double u = y[n];
    const double eta = y[2 * n + 1];
    const Vector fx = f * xi;
    Vector d(2 * n + 2);
    d.head(n) = series_exp(u * l) * xi;
    d[n] = eta;
    d.segment(n + 1, n) = eta * fx;
    d[2 * n + 1] = -fx.dot(xi);
    return d;
  };
}

/// Random matrix with entries uniform in [-scale, scale].
inline Matrix random_matrix(Rng& rng, int n, double scale) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

/// Random trace-free L and a linear F with eigenvalues of both signs of real
/// part (F = D + small skew part, D diagonal with mixed signs).
inline Matrix mixed_sign_field(Rng& rng, int n) {
  Matrix f = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) f(i, i) = (i % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.5, 1.5);
  Matrix k = random_matrix(rng, n, 0.3);
  return f + (k - k.transpose());
}

inline Matrix traceless(Rng& rng, int n, double scale) {
  Matrix l = random_matrix(rng, n, scale);
  l.diagonal().array() -= l.trace() / n;
  return l;
}

}  // namespace lfsys::oracle
