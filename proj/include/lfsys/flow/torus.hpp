#pragma once

#include <cstdint>
#include <vector>

#include "lfsys/euler/euler.hpp"
#include "lfsys/flow/lf_flow.hpp"

namespace lfsys {

/// The (n+1)-torus swept by the leaf {u = a, (xi, eta) = v(0)} over one
/// period of a reversible Euler orbit.
struct InvariantTorus {
  double a = 0.0;
  double period = 0.0;
  AlgebraPoint base;              // v(0)
  Vector translation;             // c0
  Vector translation_coords;      // lattice coordinates of c0 reduced to [0,1)
  double quadrature_error = 0.0;  // |c0(N) - c0(2N)|
  std::size_t quadrature_nodes = 0;
  std::vector<Vector> base_points;  // w of the tested leaf points
  double verify_defect = 0.0;       // max |Psi^T(w,a;v0) - (w + c0, a; v0)|
  double translation_spread = 0.0;  // max pairwise |(w_i(T) - w_i) - (w_j(T) - w_j)|
  double u_min = 0.0;               // range of u(t) - a over the period
  double u_max = 0.0;
};

/// Throws VerificationFailure when the leaf-return defect exceeds
/// tol.torus_verify.
InvariantTorus build_invariant_torus(const PeriodicOrbit& orbit, double a, const SystemSpec& sys,
                                     const Tolerances& tol = {}, std::uint64_t seed = 1);

/// c0 = int_0^T e^{(a + u(s) - u(0)) L} xi(s) ds, 16-point Gauss-Legendre on
/// each of `pieces` equal parts of every dense segment of the orbit.
Vector torus_translation(const PeriodicOrbit& orbit, double a, const OperatorL& l, int pieces);

struct RotationVector {
  Vector frequencies;  // (c0 mod Gamma_0 in lattice coordinates, 1) / T
  /// Integer vectors k (length n+1) with k . (x, 1) within tolerance of an
  /// integer multiple, max |k_i| <= 64; the last entry is the integer.
  std::vector<std::vector<int>> resonances;
};

RotationVector rotation_vector(const InvariantTorus& torus, double tol = 1e-8);

}  // namespace lfsys
