#pragma once

#include "lfsys/compact/compact.hpp"
#include "lfsys/core/field.hpp"
#include "lfsys/core/tolerances.hpp"
#include "lfsys/core/types.hpp"
#include "lfsys/ode/integrator.hpp"

namespace lfsys {

/// One L-F system: the pair (L, F), the lattice, and whether the quotient by
/// Gamma = Gamma_0 x| <(0,1)> is taken.
struct SystemSpec {
  OperatorL L;
  FieldSpec F;
  Lattice lattice;
  bool compactified = false;
  /// e^L in lattice coordinates (compactified systems).
  IntMatrix automorphism;

  int dim() const { return L.dim(); }

  /// Validates dimensions and, when compactify is set, the automorphism and
  /// unimodularity conditions. Throws InvalidInput with the failing check.
  static SystemSpec make(OperatorL l, FieldSpec f, Lattice lattice = {}, bool compactify = false,
                         const Tolerances& tol = {});
};

/// (e^{uL} xi, eta, eta F(xi), -<F(xi), xi>)
PhaseState lf_rhs(const PhaseState& p, const SystemSpec& sys, double slack = 1e-9);

/// lf_rhs on the packed layout [w, u, xi, eta].
ode::Rhs lf_system(const SystemSpec& sys);

PhaseState flow(const PhaseState& p, const SystemSpec& sys, double t,
                const Tolerances& tol = {});

/// Full trajectory on the packed layout.
ode::Trajectory flow_trajectory(const PhaseState& p, const SystemSpec& sys, double t,
                                const Tolerances& tol = {});

/// (w1,u1)(w2,u2) = (w1 + e^{u1 L} w2, u1 + u2)
GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b, const OperatorL& l);

/// Psi^t(g, v) = (g h(t,v), psi^t v) with h(t,v) = (w0, u0).
struct Cocycle {
  double t = 0.0;
  Vector w0;
  double u0 = 0.0;
  AlgebraPoint end;  // psi^t(v0)

  GroupPoint h() const { return GroupPoint{w0, u0}; }
};

Cocycle cocycle_of(const AlgebraPoint& v0, const SystemSpec& sys, double t,
                   const Tolerances& tol = {});

/// The cocycle reconstruction (w + e^{uL} w0, u + u0; psi^t v).
PhaseState apply_cocycle(const PhaseState& p, const Cocycle& c, const OperatorL& l);

/// |h(t+s, v) - h(t, v) h(s, psi^t v)|
double cocycle_defect(const AlgebraPoint& v0, const SystemSpec& sys, double t, double s,
                      const Tolerances& tol = {});

/// |J(Psi^t p) - Psi^{-t}(J p)|, with w compared modulo Gamma_0 when
/// compactified.
double reversibility_defect(const PhaseState& p, const SystemSpec& sys, double t,
                            const Tolerances& tol = {});

/// Distance between phase states; w modulo the lattice when compactified.
double phase_distance(const PhaseState& a, const PhaseState& b, const SystemSpec& sys);

/// Phi = e^{-uF} xi. Throws Unsupported for non-linear F.
Vector first_integrals(const PhaseState& p, const FieldSpec& f);
Vector first_integrals(const PhaseState& p, const Matrix& f);

}  // namespace lfsys
