#pragma once

#include <cstdint>
#include <random>

#include "lfsys/core/linalg.hpp"

namespace lfsys {

/// Lie-algebra coordinates (xi, eta): xi in the abelian ideal, eta along b.
struct AlgebraPoint {
  Vector xi;
  double eta = 0.0;

  int dim() const { return static_cast<int>(xi.size()); }
  double norm_squared() const { return xi.squaredNorm() + eta * eta; }
  bool finite() const;
};

/// Group coordinates (w, u) of the semidirect product R^n x| R.
struct GroupPoint {
  Vector w;
  double u = 0.0;

  bool finite() const;
};

/// A point of TG = G x g in left-trivialised coordinates (w, u; xi, eta).
struct PhaseState {
  GroupPoint group;
  AlgebraPoint algebra;

  int dim() const { return algebra.dim(); }

  static PhaseState make(Vector w, double u, Vector xi, double eta) {
    return PhaseState{GroupPoint{std::move(w), u}, AlgebraPoint{std::move(xi), eta}};
  }
};

/// Flat layout [w (n), u, xi (n), eta] used by the integrator.
Vector pack(const PhaseState& p);
PhaseState unpack(const Vector& y, int n);

/// Flat layout [xi (n), eta].
Vector pack(const AlgebraPoint& v);
AlgebraPoint unpack_algebra(const Vector& y, int n);

enum class Involution { J, JTilde, DK };

/// J: (w,u;xi,eta) -> (-w,u;xi,-eta); JTilde: (w,u;-xi,-eta); DK: (-w,u;-xi,eta).
PhaseState involution(Involution kind, const PhaseState& p);

/// Rank-n lattice Gamma_0 spanned by the columns of `basis`.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(Matrix basis);

  static Lattice integer(int n) { return Lattice(Matrix::Identity(n, n)); }

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }

  Vector to_coords(const Vector& w) const { return inverse_ * w; }
  Vector from_coords(const Vector& x) const { return basis_ * x; }

  /// Lattice coordinates reduced to [0,1)^n.
  Vector fractional_coords(const Vector& w) const;

  /// Representative of w + Gamma_0 in the fundamental parallelepiped.
  Vector reduce(const Vector& w) const { return from_coords(fractional_coords(w)); }

  /// Euclidean length of the shortest representative of (a - b) mod Gamma_0,
  /// using nearest-integer reduction of lattice coordinates.
  double wrapped_distance(const Vector& a, const Vector& b) const;

 private:
  Matrix basis_;
  Matrix inverse_;
};

/// x - floor(x) with values within 1e-12 of 1 snapped to 0.
double wrap_unit(double x);

/// The one random stream used by every sampled experiment: std::mt19937_64
/// seeded with the scenario seed; a double in [0,1) is (next() >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in the open ball of the given radius, by rejection from the cube.
  Vector in_ball(int n, double radius);
  /// Uniform on the unit sphere S^{n-1}: rejection sample then normalise.
  Vector on_sphere(int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lfsys
