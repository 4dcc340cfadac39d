#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lfsys/core/operator.hpp"

namespace lfsys {

/// F(xi) = F xi.
struct LinearField {
  Matrix matrix;
};

/// F(xi) = L* xi - C xi, the field of a para-metric weakly K-invariant
/// connection whose deviation tensor is B(X,X) = eta C xi - <C xi, xi> b.
struct ConnectionField {
  OperatorL L;
  Matrix C;
};

/// F(xi) = L* xi - xi / k, the isokinetic thermostat at kinetic energy k.
struct ThermostatField {
  OperatorL L;
  double k = 1.0;
};

/// Vector polynomial field with a dense coefficient table over all monomials
/// of total degree <= degree, in graded lexicographic order.
class PolynomialField {
 public:
  PolynomialField() = default;
  PolynomialField(int n, int degree);

  int dim() const { return n_; }
  int degree() const { return degree_; }
  const std::vector<std::vector<int>>& monomials() const { return monomials_; }
  /// coefficients()(component, monomial index)
  const Matrix& coefficients() const { return coeffs_; }

  /// Index of the monomial with the given exponents; throws InvalidInput if
  /// the exponent vector is not in the table.
  int monomial_index(const std::vector<int>& exponents) const;
  void set_coefficient(int component, const std::vector<int>& exponents, double value);
  void add_coefficient(int component, const std::vector<int>& exponents, double value);

  Vector eval(const Vector& xi) const;
  Matrix jacobian(const Vector& xi) const;
  double divergence(const Vector& xi) const;
  bool constant_divergence() const;

  /// Whether field_eval rejects points outside the closed unit ball.
  bool ball_restricted = true;

 private:
  int n_ = 0;
  int degree_ = 0;
  std::vector<std::vector<int>> monomials_;
  Matrix coeffs_;
};

struct DivergenceInfo {
  double value = 0.0;
  bool constant = false;
};

/// The functional parameter F of an L-F system.
class FieldSpec {
 public:
  using Variant = std::variant<LinearField, ConnectionField, ThermostatField, PolynomialField>;

  FieldSpec() = default;
  explicit FieldSpec(Variant v);

  static FieldSpec linear(Matrix f);
  static FieldSpec connection(OperatorL l, Matrix c);
  static FieldSpec thermostat(OperatorL l, double k);
  static FieldSpec polynomial(PolynomialField p);

  int dim() const;
  const Variant& variant() const { return v_; }
  const char* kind_name() const;

  /// F(xi), enforcing the closed-ball domain (plus slack) for ball-restricted
  /// polynomial fields.
  Vector eval(const Vector& xi, double slack = 1e-9) const;
  /// F(xi) without the domain check; integrators use this for trial stages.
  Vector eval_unchecked(const Vector& xi) const;
  Matrix jacobian(const Vector& xi) const;
  DivergenceInfo divergence(const Vector& xi) const;

  /// The matrix of F when it is linear (every variant except Polynomial).
  std::optional<Matrix> linear_matrix() const;
  bool is_linear() const { return !std::holds_alternative<PolynomialField>(v_); }

 private:
  Variant v_;
  // Cached matrix for the linear variants.
  Matrix linear_;
};

}  // namespace lfsys
