#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "lfsys/core/errors.hpp"
#include "lfsys/euler/euler.hpp"

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

const FieldSpec kSaddle = FieldSpec::linear(m2(1, 0, 0, -1));
const double kExit = 0.5 * std::log(2.0 + std::sqrt(3.0));

ode::Options tight() {
  ode::Options o;
  o.tol = ode::Tolerance{1e-12, 1e-12};
  return o;
}

}  // namespace

TEST(EulerRhs, Examples) {
  const AlgebraPoint d = euler_rhs(AlgebraPoint{v2(0.6, 0.8), 0.0}, kSaddle);
  EXPECT_EQ(d.xi, v2(0, 0));
  EXPECT_NEAR(d.eta, 0.28, 1e-15);
  const AlgebraPoint s = euler_rhs(AlgebraPoint{v2(0.3, -0.4), 0.7}, FieldSpec::linear(m2(0, 1, -1, 0)));
  EXPECT_EQ(s.eta, 0.0);
  const AlgebraPoint z = euler_rhs(AlgebraPoint{v2(0, 0), 1.0}, kSaddle);
  EXPECT_EQ(z.xi.norm(), 0.0);
  EXPECT_EQ(z.eta, 0.0);
}

TEST(DetectEscape, SaddleClosedForm) {
  const EscapeResult e = detect_escape(v2(0.5, 0.5), kSaddle, 50.0);
  ASSERT_EQ(e.verdict, Verdict::Escaping);
  EXPECT_NEAR(e.s_plus, kExit, 1e-9);
  EXPECT_NEAR(e.s_minus, -kExit, 1e-9);
  EXPECT_NEAR(e.transversality_plus, std::sqrt(3.0) / 2, 1e-9);
  EXPECT_NEAR(e.transversality_minus, -std::sqrt(3.0) / 2, 1e-9);
  EXPECT_NEAR(e.exit_plus.norm(), 1.0, 1e-8);
  EXPECT_NEAR(e.exit_minus.norm(), 1.0, 1e-8);
  // Closed form zeta(s) = (0.5 e^s, 0.5 e^-s).
  EXPECT_NEAR(e.exit_plus[0], 0.5 * std::exp(kExit), 1e-9);
  EXPECT_NEAR(e.exit_plus[1], 0.5 * std::exp(-kExit), 1e-9);
}

TEST(DetectEscape, SkewIsBounded) {
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const EscapeResult e = detect_escape(rng.in_ball(2, 0.95), FieldSpec::linear(m2(0, 1, -1, 0)), 50.0);
    EXPECT_EQ(e.verdict, Verdict::Bounded);
  }
}

TEST(DetectEscape, AxisPointIsNotEscaping) {
  const EscapeResult e = detect_escape(v2(0.5, 0.0), kSaddle, 50.0);
  EXPECT_NE(e.verdict, Verdict::Escaping);
  EXPECT_EQ(e.verdict, Verdict::Undetermined);
}

TEST(DetectEscape, InvariantsOnRandomSeeds) {
  Rng rng(8);
  const FieldSpec f = FieldSpec::linear(m2(0.8, 0.4, -0.1, -1.1));
  int escaping = 0;
  for (int i = 0; i < 30; ++i) {
    const EscapeResult e = detect_escape(rng.in_ball(2, 0.9), f, 50.0);
    if (e.verdict != Verdict::Escaping) continue;
    ++escaping;
    EXPECT_LT(e.transversality_minus, -1e-9);
    EXPECT_GT(e.transversality_plus, 1e-9);
    EXPECT_NEAR(e.exit_plus.norm(), 1.0, 1e-8);
    EXPECT_NEAR(e.exit_minus.norm(), 1.0, 1e-8);
    EXPECT_LE(e.s_minus, 0.0);
    EXPECT_GE(e.s_plus, 0.0);
  }
  EXPECT_GT(escaping, 10);
}

TEST(DetectEscape, SameOrbitSameExits) {
  Rng rng(9);
  const FieldSpec f = FieldSpec::linear(m2(1, 0.5, 0.2, -0.7));
  for (int i = 0; i < 10; ++i) {
    const Vector z = rng.in_ball(2, 0.8);
    const EscapeResult a = detect_escape(z, f, 50.0);
    if (a.verdict != Verdict::Escaping) continue;
    // A point further along the same integral curve, at s = 0.4 s_plus.
    const Vector z2 = oracle::rk4([&](const Vector& x) { return Vector(f.eval_unchecked(x)); }, z,
                                  0.4 * a.s_plus, 4000);
    const EscapeResult b = detect_escape(z2, f, 50.0);
    ASSERT_EQ(b.verdict, Verdict::Escaping);
    EXPECT_LT((a.exit_plus - b.exit_plus).norm(), 1e-6);
    EXPECT_LT((a.exit_minus - b.exit_minus).norm(), 1e-6);
    EXPECT_NEAR(b.s_plus - b.s_minus, a.s_plus - a.s_minus, 1e-6);
  }
}

TEST(ConservedQuadratic, FoundForImaginarySpectrum) {
  const auto p = conserved_quadratic(m2(0, 2, -0.5, 0));
  ASSERT_TRUE(p);
  // Proportional to diag(1/2, 2).
  EXPECT_NEAR((*p)(1, 1) / (*p)(0, 0), 4.0, 1e-9);
  EXPECT_NEAR((*p)(0, 1), 0.0, 1e-9);
  EXPECT_FALSE(conserved_quadratic(m2(1, 0, 0, -1)));
}

TEST(PeriodicOrbit, SaddleOrbit) {
  const EscapeResult e = detect_escape(v2(0.5, 0.5), kSaddle, 50.0);
  const PeriodicOrbit o = build_periodic_orbit(e, kSaddle);
  EXPECT_LE(o.closure_defect, 1e-6);
  EXPECT_LE(o.symmetry_defect, 1e-6);
  EXPECT_NEAR(o.state_at(0.0).eta, 0.0, 1e-8);
  EXPECT_NEAR(o.state_at(o.t0).eta, 0.0, 1e-8);
  EXPECT_NEAR(o.u_at(0.0), e.s_minus, 1e-6);
  EXPECT_NEAR(o.u_at(o.t0), e.s_plus, 1e-6);
  EXPECT_NEAR(o.u_at(o.period), o.u_at(0.0), 1e-6);
  for (const auto& [t, u] : o.u_profile()) {
    EXPECT_GE(u, e.s_minus - 1e-6);
    EXPECT_LE(u, e.s_plus + 1e-6);
  }
  // Mirror images: exit_plus is exit_minus with coordinates swapped.
  EXPECT_NEAR(e.exit_plus[0], e.exit_minus[1], 1e-9);
  EXPECT_NEAR(e.exit_plus[1], e.exit_minus[0], 1e-9);
}

TEST(PeriodicOrbit, HalfPeriodMatchesIndependentIntegration) {
  const EscapeResult e = detect_escape(v2(0.5, 0.5), kSaddle, 50.0);
  const PeriodicOrbit o = build_periodic_orbit(e, kSaddle);
  // RK4 on the Euler equations from (exit_minus, 0): eta returns to zero at t0.
  oracle::Field g = [](const Vector& y) {
    Vector d(3);
    d[0] = y[2] * y[0];
    d[1] = -y[2] * y[1];
    d[2] = -(y[0] * y[0] - y[1] * y[1]);
    return d;
  };
  Vector y0(3);
  y0 << e.exit_minus[0], e.exit_minus[1], 0.0;
  const Vector y = oracle::rk4(g, y0, o.t0, 20000);
  EXPECT_NEAR(y[2], 0.0, 1e-9);
  EXPECT_LT((y.head(2) - e.exit_plus).norm(), 1e-8);
}

TEST(PeriodicOrbit, RejectsNonEscaping) {
  EscapeResult e;
  e.verdict = Verdict::Bounded;
  EXPECT_THROW(build_periodic_orbit(e, kSaddle), InvalidInput);
}

TEST(PeriodicOrbit, ClosureOnMarginSeeds) {
  Rng rng(12);
  const FieldSpec f = FieldSpec::linear(m2(0.5, 0.3, -0.2, -1.5));
  int built = 0;
  for (int i = 0; i < 20 && built < 6; ++i) {
    const EscapeResult e = detect_escape(rng.in_ball(2, 0.9), f, 50.0);
    if (e.verdict != Verdict::Escaping || e.transversality_plus < 1e-3 ||
        e.transversality_minus > -1e-3)
      continue;
    const PeriodicOrbit o = build_periodic_orbit(e, f);
    EXPECT_LE(o.closure_defect, 1e-6);
    EXPECT_LE(o.symmetry_defect, 1e-6);
    ++built;
  }
  EXPECT_GE(built, 3);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify_linear_field(m2(1, 0, 0, -1)).tag, SpectrumTag::MixedRealParts);
  EXPECT_EQ(classify_linear_field(m2(0, 1, -1, 0)).tag, SpectrumTag::Skew);
  EXPECT_EQ(classify_linear_field(m2(0, 2, -0.5, 0)).tag, SpectrumTag::ImaginaryNonSkew);
  EXPECT_EQ(classify_linear_field(m2(1, 0, 0, 2)).tag, SpectrumTag::Other);
}

TEST(Classify, ResonantImaginary) {
  // Frequencies 1 and 2 in R^4.
  Matrix f = Matrix::Zero(4, 4);
  f(0, 1) = 2;
  f(1, 0) = -0.5;
  f(2, 3) = 4;
  f(3, 2) = -1;
  const SpectrumClass c = classify_linear_field(f);
  EXPECT_EQ(c.tag, SpectrumTag::PureImaginaryResonant);
  EXPECT_FALSE(c.resonance.empty());
}

TEST(Classify, TagConsistentWithRealParts) {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const Matrix f = oracle::random_matrix(rng, 3, 1.0);
    const SpectrumClass c = classify_linear_field(f);
    bool pos = false, neg = false;
    for (const auto& z : c.eigenvalues) {
      pos = pos || z.real() > 1e-9;
      neg = neg || z.real() < -1e-9;
    }
    EXPECT_EQ(c.tag == SpectrumTag::MixedRealParts, pos && neg);
  }
}

TEST(EscapeMap, SkewHasNoEscapes) {
  const EscapeMap m = sample_escaping_set(FieldSpec::linear(m2(0, 1, -1, 0)), 21, 50.0);
  EXPECT_EQ(m.escaping, 0u);
  EXPECT_EQ(m.bounded, m.inside);
}

TEST(EscapeMap, SaddleEscapesAlmostEverywhere) {
  const EscapeMap m = sample_escaping_set(kSaddle, 101, 50.0, {}, 2);
  EXPECT_GE(m.escaping_fraction(), 0.95);
}

TEST(EscapeMap, CellCentresAndIndexing) {
  const EscapeMap m = sample_escaping_set(kSaddle, 4, 50.0);
  ASSERT_EQ(m.cells.size(), 16u);
  EXPECT_NEAR(m.cells[0].center[0], -0.75, 1e-15);
  EXPECT_NEAR(m.cells[1].center[0], -0.25, 1e-15);
  EXPECT_NEAR(m.cells[4].center[1], -0.25, 1e-15);
  EXPECT_FALSE(m.cells[0].inside);  // (-0.75, -0.75) lies outside the ball
}

TEST(EscapeMap, ThreadCountDoesNotChangeResult) {
  const FieldSpec f = FieldSpec::linear(m2(0, 2, -0.5, 0));
  const EscapeMap a = sample_escaping_set(f, 31, 50.0, {}, 1);
  const EscapeMap b = sample_escaping_set(f, 31, 50.0, {}, 4);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].result.verdict, b.cells[i].result.verdict);
    EXPECT_EQ(a.cells[i].result.s_plus, b.cells[i].result.s_plus);
  }
}

TEST(EulerFlow, SphereInvarianceRandomFields) {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 2;
    FieldSpec f;
    if (trial < 3) {
      f = FieldSpec::linear(oracle::random_matrix(rng, n, 1.0));
    } else {
      PolynomialField p(n, 2);
      for (int c = 0; c < n; ++c)
        for (const auto& mono : p.monomials()) p.set_coefficient(c, mono, rng.uniform(-0.5, 0.5));
      p.ball_restricted = false;
      f = FieldSpec::polynomial(p);
    }
    const Vector s = rng.on_sphere(n + 1);
    const auto tr = ode::integrate(euler_system(f), s, 0.0, 100.0, tight());
    double drift = 0.0;
    for (const auto& y : tr.states()) drift = std::max(drift, std::abs(y.squaredNorm() - 1.0));
    EXPECT_LE(drift, 1e-9) << "trial " << trial;
  }
}

TEST(EulerFlow, JReversibility) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const FieldSpec f = FieldSpec::linear(oracle::random_matrix(rng, 2, 1.0));
    const Vector v = rng.on_sphere(3);
    const double t = rng.uniform(0.5, 10.0);
    const auto fwd = ode::integrate(euler_system(f), v, 0.0, t, tight());
    Vector jv = v;
    jv[2] = -jv[2];
    const auto bwd = ode::integrate(euler_system(f), jv, 0.0, -t, tight());
    Vector a = fwd.back();
    a[2] = -a[2];
    EXPECT_LT((a - bwd.front()).norm(), 1e-6);
  }
}

TEST(EulerFlow, TimeChangeConsistency) {
  // On the upper hemisphere, xi(t) = zeta(s(t)) with ds = eta dt.
  const FieldSpec f = FieldSpec::linear(m2(0.7, 0.2, 0.1, -0.9));
  Vector y0(3);
  y0 << 0.2, 0.3, std::sqrt(1 - 0.13);
  Vector y0u(4);
  y0u << y0, 0.0;
  const auto arc = ode::integrate(euler_u_system(f), y0u, 0.0, 0.8, tight());
  const Vector zeta0 = y0.head(2);
  for (double t : {0.2, 0.5, 0.8}) {
    const Vector y = arc.at(t);
    const double s = y[3];  // s(t) = int eta dt
    const Vector zeta = oracle::rk4([&](const Vector& x) { return Vector(f.eval_unchecked(x)); },
                                    zeta0, s, 4000);
    EXPECT_LT((zeta - y.head(2)).norm(), 1e-6) << t;
  }
}
