#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "lfsys/core/errors.hpp"
#include "lfsys/flow/lf_flow.hpp"
#include "lfsys/flow/torus.hpp"

using namespace lfsys;

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SystemSpec saddle() {
  return SystemSpec::make(OperatorL(m2(1, 0, 0, -1)), FieldSpec::linear(m2(1, 0, 0, -1)));
}

Tolerances tight() {
  Tolerances t;
  t.ode_abs = t.ode_rel = 1e-12;
  return t;
}

PhaseState random_state(Rng& rng, int n) {
  const Vector s = rng.on_sphere(n + 1);
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = rng.uniform(-2, 2);
  return PhaseState::make(w, rng.uniform(-1, 1), s.head(n), s[n]);
}

}  // namespace

TEST(LfRhs, Examples) {
  const SystemSpec sys = saddle();
  const PhaseState d = lf_rhs(PhaseState::make(Vector::Zero(2), 0, Vector::Zero(2), 1.0), sys);
  EXPECT_EQ(d.group.w.norm(), 0.0);
  EXPECT_EQ(d.group.u, 1.0);
  EXPECT_EQ(d.algebra.xi.norm(), 0.0);
  EXPECT_EQ(d.algebra.eta, 0.0);
  const PhaseState e = lf_rhs(PhaseState::make(v2(5, 6), 0, v2(0.3, -0.2), 0.4), sys);
  EXPECT_EQ(e.group.w, v2(0.3, -0.2));
  const PhaseState g = lf_rhs(PhaseState::make(Vector::Zero(2), std::log(2.0), v2(1, 1), 0.0), sys);
  EXPECT_NEAR(g.group.w[0], 2.0, 1e-14);
  EXPECT_NEAR(g.group.w[1], 0.5, 1e-15);
}

TEST(SystemSpec, Validation) {
  EXPECT_THROW(SystemSpec::make(OperatorL(m2(1, 0, 0, -1)), FieldSpec::linear(Matrix::Identity(3, 3))),
               InvalidInput);
  EXPECT_THROW(SystemSpec::make(OperatorL(m2(1, 0, 0, -1)), FieldSpec::linear(m2(1, 0, 0, -1)),
                                Lattice::integer(2), true),
               InvalidInput);
  EXPECT_THROW(SystemSpec::make(OperatorL(m2(1, 0, 0, 1)), FieldSpec::linear(m2(1, 0, 0, -1)),
                                Lattice::integer(2), true),
               InvalidInput);
}

TEST(Flow, ZeroTimeIsIdentity) {
  Rng rng(1);
  const PhaseState p = random_state(rng, 2);
  const PhaseState q = flow(p, saddle(), 0.0);
  EXPECT_EQ(q.group.w, p.group.w);
  EXPECT_EQ(q.algebra.eta, p.algebra.eta);
}

TEST(Flow, SuspensionLine) {
  const PhaseState p = PhaseState::make(v2(0.3, 0.1), 0.2, Vector::Zero(2), 1.0);
  const PhaseState q = flow(p, saddle(), 3.0, tight());
  EXPECT_LT((q.group.w - p.group.w).norm(), 1e-14);
  EXPECT_NEAR(q.group.u, 3.2, 1e-12);
  EXPECT_EQ(q.algebra.xi.norm(), 0.0);
  EXPECT_NEAR(q.algebra.eta, 1.0, 1e-15);
}

TEST(Flow, MatchesIndependentRk4) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix l = oracle::traceless(rng, 2, 1.0);
    const Matrix f = oracle::random_matrix(rng, 2, 1.0);
    const SystemSpec sys = SystemSpec::make(OperatorL(l), FieldSpec::linear(f));
    const PhaseState p = random_state(rng, 2);
    const Vector ref = oracle::rk4(oracle::lf_field(l, f), pack(p), 3.0, 6000);
    EXPECT_LT((pack(flow(p, sys, 3.0, tight())) - ref).norm(), 1e-8) << trial;
  }
}

TEST(Flow, LeftInvariance) {
  Rng rng(3);
  const SystemSpec sys = saddle();
  for (int trial = 0; trial < 5; ++trial) {
    const PhaseState p = random_state(rng, 2);
    const Vector g = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    PhaseState shifted = p;
    shifted.group.w += g;
    const PhaseState a = flow(shifted, sys, 4.0, tight());
    PhaseState b = flow(p, sys, 4.0, tight());
    b.group.w += g;
    EXPECT_LT((pack(a) - pack(b)).norm(), 1e-8);
  }
}

TEST(Flow, SphereBundlePreserved) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + trial % 2;
    const SystemSpec sys = SystemSpec::make(OperatorL(oracle::traceless(rng, n, 1.0)),
                                            FieldSpec::linear(oracle::random_matrix(rng, n, 1.0)));
    const PhaseState p = random_state(rng, n);
    Tolerances tol;
    tol.ode_abs = tol.ode_rel = 1e-11;
    const auto tr = flow_trajectory(p, sys, 100.0, tol);
    double drift = 0.0;
    for (const auto& y : tr.states())
      drift = std::max(drift, std::abs(unpack(y, n).algebra.norm_squared() - 1.0));
    EXPECT_LE(drift, 1e-9);
  }
}

TEST(Cocycle, Examples) {
  const SystemSpec sys = saddle();
  const Cocycle a = cocycle_of(AlgebraPoint{Vector::Zero(2), 1.0}, sys, 2.5, tight());
  EXPECT_LT(a.w0.norm(), 1e-14);
  EXPECT_NEAR(a.u0, 2.5, 1e-12);
  // F(xi0) = 0 on the equator needs a kernel vector of F.
  const SystemSpec deg = SystemSpec::make(OperatorL(m2(1, 0, 0, -1)), FieldSpec::linear(m2(0, 0, 0, 1)));
  const Cocycle b = cocycle_of(AlgebraPoint{v2(1, 0), 0.0}, deg, 2.0, tight());
  EXPECT_NEAR(b.u0, 0.0, 1e-14);
  EXPECT_LT((b.w0 - v2(2, 0)).norm(), 1e-12);
}

TEST(Cocycle, Identity) {
  Rng rng(5);
  const SystemSpec sys = saddle();
  for (int trial = 0; trial < 5; ++trial) {
    const Vector s = rng.on_sphere(3);
    EXPECT_LE(cocycle_defect(AlgebraPoint{s.head(2), s[2]}, sys, 1.0, 1.0, tight()), 1e-7);
  }
}

TEST(Cocycle, ReconstructionMatchesFlow) {
  Rng rng(6);
  const SystemSpec sys = SystemSpec::make(OperatorL(oracle::traceless(rng, 3, 1.0)),
                                          FieldSpec::linear(oracle::random_matrix(rng, 3, 1.0)));
  for (int trial = 0; trial < 5; ++trial) {
    const PhaseState p = random_state(rng, 3);
    const Cocycle c = cocycle_of(p.algebra, sys, 5.0, tight());
    const PhaseState a = apply_cocycle(p, c, sys.L);
    const PhaseState b = flow(p, sys, 5.0, tight());
    EXPECT_LT((pack(a) - pack(b)).norm(), 1e-7);
  }
}

TEST(Reversibility, Examples) {
  Rng rng(7);
  const SystemSpec sys = saddle();
  const PhaseState p = random_state(rng, 2);
  EXPECT_EQ(reversibility_defect(p, sys, 0.0), 0.0);
  // Fixed points of J: Psi^t(p) = J Psi^-t(p).
  const PhaseState fix = PhaseState::make(Vector::Zero(2), 0.4, v2(0.6, 0.8), 0.0);
  const PhaseState a = flow(fix, sys, 3.0, tight());
  const PhaseState b = involution(Involution::J, flow(fix, sys, -3.0, tight()));
  EXPECT_LT((pack(a) - pack(b)).norm(), 1e-6);
  EXPECT_LE(reversibility_defect(p, sys, 5.0, tight()), 1e-6);
}

TEST(Reversibility, RoundTripThroughJ) {
  // Psi^t J Psi^t p = J p; this composes two forward runs, so it does not
  // inherit the exact sign symmetry of a mirrored backward integration.
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const SystemSpec sys = SystemSpec::make(OperatorL(oracle::traceless(rng, 2, 1.0)),
                                            FieldSpec::linear(oracle::random_matrix(rng, 2, 1.0)));
    const PhaseState p = random_state(rng, 2);
    const PhaseState q = flow(involution(Involution::J, flow(p, sys, 10.0, tight())), sys, 10.0, tight());
    EXPECT_LT(phase_distance(q, involution(Involution::J, p), sys), 1e-6);
  }
}

TEST(FirstIntegrals, Examples) {
  const PhaseState p = PhaseState::make(v2(1, 2), 0.0, v2(0.3, 0.4), 0.5);
  EXPECT_EQ(first_integrals(p, m2(1, 0, 0, -1)), v2(0.3, 0.4));
  EXPECT_THROW(first_integrals(p, FieldSpec::polynomial(PolynomialField(2, 2))), Unsupported);
}

TEST(FirstIntegrals, Conserved) {
  Rng rng(9);
  const SystemSpec sys = saddle();
  const PhaseState p = random_state(rng, 2);
  const auto tr = flow_trajectory(p, sys, 50.0, tight());
  const Vector phi0 = first_integrals(p, sys.F);
  for (const auto& y : tr.states())
    EXPECT_LE((first_integrals(unpack(y, 2), sys.F) - phi0).norm(), 1e-7);
}

TEST(FirstIntegrals, GeodesicMomenta) {
  // F = L*: the first integrals are the momenta e^{-uL*} xi, conserved.
  Rng rng(10);
  const OperatorL l(oracle::traceless(rng, 2, 1.0));
  const SystemSpec sys = SystemSpec::make(l, FieldSpec::linear(l.adjoint()));
  const PhaseState p = random_state(rng, 2);
  const PhaseState q = flow(p, sys, 7.0, tight());
  const Vector pw0 = oracle::series_exp(-p.group.u * l.adjoint()) * p.algebra.xi;
  const Vector pw1 = oracle::series_exp(-q.group.u * l.adjoint()) * q.algebra.xi;
  EXPECT_LT((pw1 - pw0).norm(), 1e-8);
  EXPECT_LT((first_integrals(q, sys.F) - pw0).norm(), 1e-8);
}

TEST(DivergenceLaw, EtaTimesDivF) {
  Rng rng(11);
  PolynomialField poly(2, 2);
  for (int c = 0; c < 2; ++c)
    for (const auto& mono : poly.monomials()) poly.set_coefficient(c, mono, rng.uniform(-1, 1));
  const SystemSpec sys = SystemSpec::make(OperatorL(m2(0.5, 1, 0, -0.5)), FieldSpec::polynomial(poly));
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    PhaseState p = random_state(rng, 2);
    p.algebra.xi *= 0.9;
    p.algebra.eta *= 0.9;
    const Vector y = pack(p);
    double div = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      Vector a = y, b = y;
      a[i] += h;
      b[i] -= h;
      div += (pack(lf_rhs(unpack(a, 2), sys))[i] - pack(lf_rhs(unpack(b, 2), sys))[i]) / (2 * h);
    }
    EXPECT_NEAR(div, p.algebra.eta * sys.F.divergence(p.algebra.xi).value, 1e-6);
  }
}

class TorusTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sys = saddle();
    esc = detect_escape(v2(0.5, 0.5), sys.F, 50.0, tight());
    orbit = build_periodic_orbit(esc, sys.F, tight());
  }
  SystemSpec sys;
  EscapeResult esc;
  PeriodicOrbit orbit;
};

TEST_F(TorusTest, LeafReturnIsTranslation) {
  const InvariantTorus t = build_invariant_torus(orbit, 0.0, sys, tight());
  EXPECT_LE(t.verify_defect, 1e-5);
  EXPECT_LE(t.translation_spread, 1e-8);
  EXPECT_GE(t.quadrature_nodes, 512u);
  EXPECT_EQ(t.base_points.size(), 3u);
  EXPECT_GE(t.u_min, -1e-6);
  EXPECT_LE(t.u_max, esc.s_plus - esc.s_minus + 1e-6);
}

TEST_F(TorusTest, TranslationMatchesDirectFlow) {
  const InvariantTorus t = build_invariant_torus(orbit, 0.3, sys, tight());
  const AlgebraPoint v = orbit.start();
  const PhaseState p = PhaseState::make(v2(1.5, -0.5), 0.3, v.xi, v.eta);
  const PhaseState q = flow(p, sys, orbit.period, tight());
  EXPECT_LT((q.group.w - p.group.w - t.translation).norm(), 1e-6);
  EXPECT_NEAR(q.group.u, 0.3, 1e-6);
}

TEST_F(TorusTest, AnchorScalesTranslation) {
  // c0(a) = e^{aL} c0(0).
  const Vector c0 = torus_translation(orbit, 0.0, sys.L, 4);
  const Vector ca = torus_translation(orbit, 0.7, sys.L, 4);
  EXPECT_LT((ca - oracle::series_exp(0.7 * sys.L.matrix()) * c0).norm(), 1e-10);
}

TEST_F(TorusTest, RotationVectorDeterministicAndStable) {
  const InvariantTorus t1 = build_invariant_torus(orbit, 0.0, sys, tight());
  const InvariantTorus t2 = build_invariant_torus(orbit, 0.0, sys, tight());
  const RotationVector r1 = rotation_vector(t1);
  const RotationVector r2 = rotation_vector(t2);
  EXPECT_EQ(r1.frequencies, r2.frequencies);
  ASSERT_EQ(r1.frequencies.size(), 3);
  EXPECT_NEAR(r1.frequencies[2], 1.0 / orbit.period, 1e-15);
  Tolerances loose = tight();
  loose.ode_abs = loose.ode_rel = 2e-12;
  const PeriodicOrbit o2 = build_periodic_orbit(detect_escape(v2(0.5, 0.5), sys.F, 50.0, loose), sys.F, loose);
  const RotationVector r3 = rotation_vector(build_invariant_torus(o2, 0.0, sys, loose));
  EXPECT_LT((r3.frequencies - r1.frequencies).norm(), 1e-5);
}

TEST(RotationVector, LatticeTranslationGivesPeriodicFibres) {
  InvariantTorus t;
  t.period = 2.0;
  t.translation = v2(3.0, -1.0);
  t.translation_coords = v2(0.0, 0.0);
  const RotationVector r = rotation_vector(t);
  EXPECT_EQ(r.frequencies[0], 0.0);
  EXPECT_EQ(r.frequencies[1], 0.0);
  EXPECT_EQ(r.frequencies[2], 0.5);
}
