#include "lfsys/flow/lf_flow.hpp"

#include <cmath>

#include "lfsys/core/errors.hpp"

namespace lfsys {

SystemSpec SystemSpec::make(OperatorL l, FieldSpec f, Lattice lattice, bool compactify,
                            const Tolerances& tol) {
  const int n = l.dim();
  if (n < 1) throw InvalidInput("system: L must be at least 1x1");
  if (f.dim() != n) throw InvalidInput("system: F dimension does not match L");
  if (lattice.dim() == 0) lattice = Lattice::integer(n);
  if (lattice.dim() != n) throw InvalidInput("system: lattice dimension does not match L");
  SystemSpec sys;
  sys.L = std::move(l);
  sys.F = std::move(f);
  sys.lattice = std::move(lattice);
  if (compactify) {
    if (!sys.L.unimodular(tol.eigen_zero)) {
      throw InvalidInput("system: compactify requires trace L = 0");
    }
    AutomorphismCheck chk = check_automorphism(sys.L, sys.lattice, tol.automorphism_rounding);
    if (!chk.ok) {
      throw InvalidInput("system: compactify requires e^L to be a lattice automorphism (defect " +
                         std::to_string(chk.defect) + ", det " + std::to_string(chk.det) + ")");
    }
    sys.compactified = true;
    sys.automorphism = chk.a;
  }
  return sys;
}

PhaseState lf_rhs(const PhaseState& p, const SystemSpec& sys, double slack) {
  const Vector fx = sys.F.eval(p.algebra.xi, slack);
  PhaseState d;
  d.group.w = sys.L.exp_scaled(p.group.u) * p.algebra.xi;
  d.group.u = p.algebra.eta;
  d.algebra.xi = p.algebra.eta * fx;
  d.algebra.eta = -fx.dot(p.algebra.xi);
  return d;
}

ode::Rhs lf_system(const SystemSpec& sys) {
  const int n = sys.dim();
  const OperatorL l = sys.L;
  const FieldSpec f = sys.F;
  const bool zero_l = l.matrix().cwiseAbs().maxCoeff() == 0.0;
  return [n, l, f, zero_l](double, const ode::State& y, ode::State& dy) {
    dy.resize(2 * n + 2);
    const double u = y[n];
    const auto xi = y.segment(n + 1, n);
    const double eta = y[2 * n + 1];
    const Vector fx = f.eval_unchecked(xi);
    if (zero_l) {
      dy.head(n) = xi;
    } else {
      dy.head(n).noalias() = l.exp_scaled(u) * xi;
    }
    dy[n] = eta;
    dy.segment(n + 1, n) = eta * fx;
    dy[2 * n + 1] = -fx.dot(xi);
  };
}

namespace {

ode::Options options_for(const Tolerances& tol) {
  ode::Options opt;
  opt.tol.abs = tol.ode_abs;
  opt.tol.rel = tol.ode_rel;
  return opt;
}

void check_state(const PhaseState& p, const SystemSpec& sys) {
  if (p.group.w.size() != sys.dim() || p.algebra.xi.size() != sys.dim()) {
    throw InvalidInput("phase state dimension does not match the system");
  }
}

}  // namespace

PhaseState flow(const PhaseState& p, const SystemSpec& sys, double t, const Tolerances& tol) {
  check_state(p, sys);
  if (t == 0.0) return p;
  ode::Options opt = options_for(tol);
  opt.record = false;
  const auto traj = ode::integrate(lf_system(sys), pack(p), 0.0, t, opt);
  return unpack(t > 0.0 ? traj.back() : traj.front(), sys.dim());
}

ode::Trajectory flow_trajectory(const PhaseState& p, const SystemSpec& sys, double t,
                                const Tolerances& tol) {
  check_state(p, sys);
  return ode::integrate(lf_system(sys), pack(p), 0.0, t, options_for(tol));
}

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b, const OperatorL& l) {
  return GroupPoint{a.w + l.exp_scaled(a.u) * b.w, a.u + b.u};
}

Cocycle cocycle_of(const AlgebraPoint& v0, const SystemSpec& sys, double t,
                   const Tolerances& tol) {
  const int n = sys.dim();
  PhaseState start = PhaseState::make(Vector::Zero(n), 0.0, v0.xi, v0.eta);
  PhaseState end = flow(start, sys, t, tol);
  Cocycle c;
  c.t = t;
  c.w0 = end.group.w;
  c.u0 = end.group.u;
  c.end = end.algebra;
  return c;
}

PhaseState apply_cocycle(const PhaseState& p, const Cocycle& c, const OperatorL& l) {
  PhaseState out;
  out.group = group_multiply(p.group, c.h(), l);
  out.algebra = c.end;
  return out;
}

double cocycle_defect(const AlgebraPoint& v0, const SystemSpec& sys, double t, double s,
                      const Tolerances& tol) {
  const Cocycle whole = cocycle_of(v0, sys, t + s, tol);
  const Cocycle first = cocycle_of(v0, sys, t, tol);
  const Cocycle second = cocycle_of(first.end, sys, s, tol);
  const GroupPoint composed = group_multiply(first.h(), second.h(), sys.L);
  const double dw = (composed.w - whole.w0).norm();
  const double du = std::abs(composed.u - whole.u0);
  return std::hypot(dw, du);
}

double phase_distance(const PhaseState& a, const PhaseState& b, const SystemSpec& sys) {
  const double dw = sys.compactified ? sys.lattice.wrapped_distance(a.group.w, b.group.w)
                                     : (a.group.w - b.group.w).norm();
  const double du = a.group.u - b.group.u;
  const double dxi = (a.algebra.xi - b.algebra.xi).norm();
  const double deta = a.algebra.eta - b.algebra.eta;
  return std::sqrt(dw * dw + du * du + dxi * dxi + deta * deta);
}

double reversibility_defect(const PhaseState& p, const SystemSpec& sys, double t,
                            const Tolerances& tol) {
  if (t == 0.0) return 0.0;
  const PhaseState lhs = involution(Involution::J, flow(p, sys, t, tol));
  const PhaseState rhs = flow(involution(Involution::J, p), sys, -t, tol);
  return phase_distance(lhs, rhs, sys);
}

Vector first_integrals(const PhaseState& p, const Matrix& f) {
  return mat_exp(-p.group.u * f) * p.algebra.xi;
}

Vector first_integrals(const PhaseState& p, const FieldSpec& f) {
  auto m = f.linear_matrix();
  if (!m) throw Unsupported("first_integrals: F is not linear");
  return first_integrals(p, *m);
}

}  // namespace lfsys
