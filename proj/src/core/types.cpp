#include "lfsys/core/types.hpp"

#include <cmath>

#include "lfsys/core/errors.hpp"

namespace lfsys {

bool AlgebraPoint::finite() const { return xi.allFinite() && std::isfinite(eta); }
bool GroupPoint::finite() const { return w.allFinite() && std::isfinite(u); }

Vector pack(const PhaseState& p) {
  const int n = p.dim();
  Vector y(2 * n + 2);
  y.head(n) = p.group.w;
  y(n) = p.group.u;
  y.segment(n + 1, n) = p.algebra.xi;
  y(2 * n + 1) = p.algebra.eta;
  return y;
}

PhaseState unpack(const Vector& y, int n) {
  return PhaseState::make(y.head(n), y(n), y.segment(n + 1, n), y(2 * n + 1));
}

Vector pack(const AlgebraPoint& v) {
  Vector y(v.dim() + 1);
  y.head(v.dim()) = v.xi;
  y(v.dim()) = v.eta;
  return y;
}

AlgebraPoint unpack_algebra(const Vector& y, int n) { return AlgebraPoint{y.head(n), y(n)}; }

PhaseState involution(Involution kind, const PhaseState& p) {
  PhaseState q = p;
  switch (kind) {
    case Involution::J:
      q.group.w = -p.group.w;
      q.algebra.eta = -p.algebra.eta;
      break;
    case Involution::JTilde:
      q.algebra.xi = -p.algebra.xi;
      q.algebra.eta = -p.algebra.eta;
      break;
    case Involution::DK:
      q.group.w = -p.group.w;
      q.algebra.xi = -p.algebra.xi;
      break;
  }
  return q;
}

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.rows() < 1 || basis_.rows() != basis_.cols())
    throw InvalidInput("Lattice: basis must be square");
  if (!basis_.allFinite()) throw InvalidInput("Lattice: non-finite basis entry");
  if (std::abs(basis_.determinant()) <= 0.0) throw InvalidInput("Lattice: basis is singular");
  inverse_ = basis_.inverse();
}

double wrap_unit(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0 - 1e-12) f = 0.0;
  return f;
}

Vector Lattice::fractional_coords(const Vector& w) const {
  Vector x = to_coords(w);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = wrap_unit(x(i));
  return x;
}

double Lattice::wrapped_distance(const Vector& a, const Vector& b) const {
  Vector d = to_coords(a - b);
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) -= std::round(d(i));
  return from_coords(d).norm();
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Vector Rng::in_ball(int n, double radius) {
  Vector v(n);
  while (true) {
    for (int i = 0; i < n; ++i) v(i) = uniform(-1.0, 1.0);
    if (v.squaredNorm() < 1.0) return radius * v;
  }
}

Vector Rng::on_sphere(int n) {
  while (true) {
    Vector v = in_ball(n, 1.0);
    const double r = v.norm();
    if (r > 1e-3) return v / r;
  }
}

}  // namespace lfsys
