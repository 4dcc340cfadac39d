#include "lfsys/core/field.hpp"

#include <cmath>
#include <numeric>

#include "lfsys/core/errors.hpp"

namespace lfsys {

namespace {

// All exponent vectors of length n with the given total degree, in
// lexicographically descending order.
void enumerate_degree(int n, int total, std::vector<int>& current, int pos,
                      std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    current[pos] = total;
    out.push_back(current);
    return;
  }
  for (int e = total; e >= 0; --e) {
    current[pos] = e;
    enumerate_degree(n, total - e, current, pos + 1, out);
  }
}

double monomial_value(const std::vector<int>& exps, const Vector& xi) {
  double v = 1.0;
  for (std::size_t i = 0; i < exps.size(); ++i)
    for (int e = 0; e < exps[i]; ++e) v *= xi(static_cast<Eigen::Index>(i));
  return v;
}

}  // namespace

PolynomialField::PolynomialField(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1) throw InvalidInput("PolynomialField: dimension must be >= 1");
  if (degree < 0) throw InvalidInput("PolynomialField: degree must be >= 0");
  std::vector<int> current(n, 0);
  for (int d = 0; d <= degree; ++d) enumerate_degree(n, d, current, 0, monomials_);
  coeffs_ = Matrix::Zero(n, static_cast<Eigen::Index>(monomials_.size()));
}

int PolynomialField::monomial_index(const std::vector<int>& exponents) const {
  for (std::size_t i = 0; i < monomials_.size(); ++i)
    if (monomials_[i] == exponents) return static_cast<int>(i);
  throw InvalidInput("PolynomialField: exponent vector outside the coefficient table");
}

void PolynomialField::set_coefficient(int component, const std::vector<int>& exponents,
                                      double value) {
  if (component < 0 || component >= n_) throw InvalidInput("PolynomialField: bad component");
  if (!std::isfinite(value)) throw InvalidInput("PolynomialField: non-finite coefficient");
  coeffs_(component, monomial_index(exponents)) = value;
}

void PolynomialField::add_coefficient(int component, const std::vector<int>& exponents,
                                      double value) {
  if (component < 0 || component >= n_) throw InvalidInput("PolynomialField: bad component");
  coeffs_(component, monomial_index(exponents)) += value;
}

Vector PolynomialField::eval(const Vector& xi) const {
  Vector m(static_cast<Eigen::Index>(monomials_.size()));
  for (std::size_t i = 0; i < monomials_.size(); ++i)
    m(static_cast<Eigen::Index>(i)) = monomial_value(monomials_[i], xi);
  return coeffs_ * m;
}

Matrix PolynomialField::jacobian(const Vector& xi) const {
  Matrix jac = Matrix::Zero(n_, n_);
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    const auto& exps = monomials_[m];
    for (int j = 0; j < n_; ++j) {
      if (exps[j] == 0) continue;
      std::vector<int> d = exps;
      d[j] -= 1;
      const double dv = exps[j] * monomial_value(d, xi);
      jac.col(j) += coeffs_.col(static_cast<Eigen::Index>(m)) * dv;
    }
  }
  return jac;
}

double PolynomialField::divergence(const Vector& xi) const { return jacobian(xi).trace(); }

bool PolynomialField::constant_divergence() const {
  // d/dxi_i of coefficient(i, m) * xi^m contributes a non-constant term
  // whenever the differentiated monomial still has positive degree.
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    const auto& exps = monomials_[m];
    const int total = std::accumulate(exps.begin(), exps.end(), 0);
    if (total < 2) continue;
    // Sum the contributions landing on the same differentiated monomial.
    for (int i = 0; i < n_; ++i) {
      if (exps[i] == 0) continue;
      std::vector<int> target = exps;
      target[i] -= 1;
      double sum = 0.0;
      for (int j = 0; j < n_; ++j) {
        std::vector<int> src = target;
        src[j] += 1;
        const int idx = monomial_index(src);
        sum += src[j] * coeffs_(j, idx);
      }
      if (sum != 0.0) return false;
    }
  }
  return true;
}

FieldSpec::FieldSpec(Variant v) : v_(std::move(v)) {
  std::visit(
      [this](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearField>) {
          if (f.matrix.rows() < 1 || f.matrix.rows() != f.matrix.cols())
            throw InvalidInput("LinearField: matrix must be square");
          if (!f.matrix.allFinite()) throw InvalidInput("LinearField: non-finite entry");
          linear_ = f.matrix;
        } else if constexpr (std::is_same_v<T, ConnectionField>) {
          if (f.C.rows() != f.L.dim() || f.C.cols() != f.L.dim())
            throw InvalidInput("ConnectionField: C dimension does not match L");
          if (!f.C.allFinite()) throw InvalidInput("ConnectionField: non-finite entry");
          linear_ = f.L.adjoint() - f.C;
        } else if constexpr (std::is_same_v<T, ThermostatField>) {
          if (!(f.k > 0.0) || !std::isfinite(f.k))
            throw InvalidInput("ThermostatField: k must be positive and finite");
          const int n = f.L.dim();
          linear_ = f.L.adjoint() - Matrix::Identity(n, n) / f.k;
        } else {
          if (f.dim() < 1) throw InvalidInput("PolynomialField: empty field");
        }
      },
      v_);
}

FieldSpec FieldSpec::linear(Matrix f) { return FieldSpec(LinearField{std::move(f)}); }
FieldSpec FieldSpec::connection(OperatorL l, Matrix c) {
  return FieldSpec(ConnectionField{std::move(l), std::move(c)});
}
FieldSpec FieldSpec::thermostat(OperatorL l, double k) {
  return FieldSpec(ThermostatField{std::move(l), k});
}
FieldSpec FieldSpec::polynomial(PolynomialField p) { return FieldSpec(std::move(p)); }

int FieldSpec::dim() const {
  if (const auto* p = std::get_if<PolynomialField>(&v_)) return p->dim();
  return static_cast<int>(linear_.rows());
}

const char* FieldSpec::kind_name() const {
  switch (v_.index()) {
    case 0: return "linear";
    case 1: return "connection";
    case 2: return "thermostat";
    default: return "polynomial";
  }
}

Vector FieldSpec::eval(const Vector& xi, double slack) const {
  if (xi.size() != dim()) throw InvalidInput("field_eval: dimension mismatch");
  if (const auto* p = std::get_if<PolynomialField>(&v_)) {
    if (p->ball_restricted && xi.norm() > 1.0 + slack)
      throw DomainError("field_eval: point outside the closed unit ball");
    return p->eval(xi);
  }
  return linear_ * xi;
}

Vector FieldSpec::eval_unchecked(const Vector& xi) const {
  if (const auto* p = std::get_if<PolynomialField>(&v_)) return p->eval(xi);
  return linear_ * xi;
}

Matrix FieldSpec::jacobian(const Vector& xi) const {
  if (const auto* p = std::get_if<PolynomialField>(&v_)) return p->jacobian(xi);
  return linear_;
}

DivergenceInfo FieldSpec::divergence(const Vector& xi) const {
  return std::visit(
      [&](const auto& f) -> DivergenceInfo {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearField>) {
          return {f.matrix.trace(), true};
        } else if constexpr (std::is_same_v<T, ConnectionField>) {
          return {f.L.trace() - f.C.trace(), true};
        } else if constexpr (std::is_same_v<T, ThermostatField>) {
          return {f.L.trace() - f.L.dim() / f.k, true};
        } else {
          return {f.divergence(xi), f.constant_divergence()};
        }
      },
      v_);
}

std::optional<Matrix> FieldSpec::linear_matrix() const {
  if (is_linear()) return linear_;
  return std::nullopt;
}

}  // namespace lfsys
