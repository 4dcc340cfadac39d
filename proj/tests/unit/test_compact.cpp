#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "lfsys/compact/compact.hpp"
#include "lfsys/compact/density.hpp"
#include "lfsys/compact/lyapunov.hpp"
#include "lfsys/core/errors.hpp"
#include "lfsys/euler/euler.hpp"
#include "lfsys/flow/lf_flow.hpp"

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

const double kCat = std::log((3.0 + std::sqrt(5.0)) / 2.0);

SystemSpec cat_system(FieldSpec f) {
  return SystemSpec::make(mat_log_automorphism(m2(2, 1, 1, 1)), std::move(f), Lattice::integer(2), true);
}

Tolerances tight() {
  Tolerances t;
  t.ode_abs = t.ode_rel = 1e-12;
  return t;
}

bool agree(double f, double t) { return std::abs(f - t) <= std::max(0.02 * std::abs(f), 1e-3); }

}  // namespace

TEST(Automorphism, Examples) {
  const AutomorphismCheck zero = check_automorphism(OperatorL::zero(2), Lattice::integer(2));
  ASSERT_TRUE(zero.ok);
  EXPECT_EQ(zero.a(0, 0), 1);
  EXPECT_EQ(zero.a(0, 1), 0);
  const AutomorphismCheck cat = check_automorphism(mat_log_automorphism(m2(2, 1, 1, 1)), Lattice::integer(2));
  ASSERT_TRUE(cat.ok);
  EXPECT_EQ(cat.a(0, 0), 2);
  EXPECT_EQ(cat.a(0, 1), 1);
  EXPECT_EQ(cat.a(1, 0), 1);
  EXPECT_EQ(cat.a(1, 1), 1);
  EXPECT_FALSE(check_automorphism(OperatorL(m2(1, 0, 0, -1)), Lattice::integer(2)).ok);
}

TEST(Automorphism, NonStandardLattice) {
  // Conjugating the cat map by a basis change keeps it a lattice automorphism.
  const Matrix b = m2(2, 1, 0, 1);
  const Matrix l = b * mat_log_automorphism(m2(2, 1, 1, 1)).matrix() * b.inverse();
  const AutomorphismCheck c = check_automorphism(OperatorL(l), Lattice(b));
  ASSERT_TRUE(c.ok);
  EXPECT_EQ(c.a(0, 0), 2);
}

TEST(ReduceMod, LatticeVectorReducesToZero) {
  const SystemSpec sys = cat_system(FieldSpec::linear(m2(1, 0, 0, -1)));
  const PhaseState r = reduce_mod(PhaseState::make(v2(1, 0), 0.5, v2(0.1, 0.1), 0.2), sys);
  EXPECT_LT(r.group.w.norm(), 1e-12);
  EXPECT_EQ(r.group.u, 0.5);
}

TEST(ReduceMod, ShiftsUByGenerator) {
  const SystemSpec sys = cat_system(FieldSpec::linear(m2(1, 0, 0, -1)));
  const PhaseState p = PhaseState::make(v2(0.3, 0.1), 1.25, v2(0.1, 0.1), 0.2);
  const PhaseState r = reduce_mod(p, sys);
  EXPECT_NEAR(r.group.u, 0.25, 1e-15);
  // Oracle: (0, -1) * (w, u) in the group, then w modulo Z^2.
  const GroupPoint g = group_multiply(GroupPoint{Vector::Zero(2), -1.0}, p.group, sys.L);
  EXPECT_LT(sys.lattice.wrapped_distance(r.group.w, g.w), 1e-12);
  EXPECT_NEAR(g.u, 0.25, 1e-15);
}

TEST(ReduceMod, RequiresCompactification) {
  const SystemSpec sys = SystemSpec::make(OperatorL(m2(1, 0, 0, -1)), FieldSpec::linear(m2(1, 0, 0, -1)));
  EXPECT_THROW(reduce_mod(PhaseState::make(v2(0, 0), 0, v2(0, 0), 1), sys), Unsupported);
}

TEST(ReduceMod, Equivariance) {
  Rng rng(31);
  const SystemSpec sys = cat_system(FieldSpec::linear(m2(0.5, 0.2, -0.3, -0.5)));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector s = rng.on_sphere(3);
    const PhaseState p = PhaseState::make(v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), rng.uniform(-2.5, 2.5),
                                          s.head(2), s[2]);
    const double t = rng.uniform(0.5, 3.0);
    const PhaseState a = reduce_mod(flow(p, sys, t, tight()), sys);
    const PhaseState b = reduce_mod(flow(reduce_mod(p, sys), sys, t, tight()), sys);
    if (std::min(a.group.u, 1.0 - a.group.u) < 1e-6) continue;  // straddles the u cut
    EXPECT_LT(phase_distance(a, b, sys), 1e-7) << trial;
  }
}

TEST(Lyapunov, CatMapSuspension) {
  const SystemSpec sys = cat_system(FieldSpec::linear(m2(1, 0, 0, -1)));
  const PhaseState p = PhaseState::make(Vector::Zero(2), 0.0, Vector::Zero(2), 1.0);
  const LyapunovReport r = lyapunov_exponents(p, sys, {10.0, 60.0, 1.0}, tight());
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.eta_average, 1.0, 1e-12);
  ASSERT_EQ(r.exponents_formula.size(), 2u);
  EXPECT_NEAR(r.exponents_formula[0], kCat, 1e-9);
  EXPECT_NEAR(r.exponents_formula[1], -kCat, 1e-9);
  EXPECT_NEAR(r.exponents_tangent[0], kCat, 0.02 * kCat);
  EXPECT_NEAR(r.exponents_tangent[1], -kCat, 0.02 * kCat);
}

TEST(Lyapunov, PeriodicOrbitHasZeroExponents) {
  const FieldSpec f = FieldSpec::linear(m2(1, 0, 0, -1));
  const SystemSpec sys = cat_system(f);
  const PeriodicOrbit o = build_periodic_orbit(detect_escape(v2(0.5, 0.5), f, 50.0, tight()), f, tight());
  const AlgebraPoint v = o.start();
  const PhaseState p = PhaseState::make(Vector::Zero(2), 0.0, v.xi, v.eta);
  // One exact period: the odd symmetry of eta makes the average vanish.
  const LyapunovReport one = lyapunov_exponents(p, sys, {0.0, o.period, o.period / 8}, tight());
  EXPECT_NEAR(one.eta_average, 0.0, 1e-8);
  // Over whole periods u returns, so e^{-uL} does too.
  const LyapunovReport r = lyapunov_exponents(p, sys, {0.0, 20 * o.period, 1.0}, tight());
  for (double x : r.exponents_formula) EXPECT_NEAR(x, 0.0, 1e-8);
  for (double x : r.exponents_tangent) EXPECT_NEAR(x, 0.0, 1e-6);
}

TEST(Lyapunov, NegativeEtaFlipsSigns) {
  const SystemSpec sys = SystemSpec::make(OperatorL(m2(1, 0, 0, -0.5)), FieldSpec::linear(m2(-1, 0, 0, -2)));
  const LyapunovOptions w{5.0, 40.0, 1.0};
  const auto up = lyapunov_exponents(PhaseState::make(Vector::Zero(2), 0, Vector::Zero(2), 1.0), sys, w, tight());
  const auto down = lyapunov_exponents(PhaseState::make(Vector::Zero(2), 0, Vector::Zero(2), -1.0), sys, w, tight());
  EXPECT_NEAR(up.eta_average, 1.0, 1e-12);
  EXPECT_NEAR(down.eta_average, -1.0, 1e-12);
  ASSERT_EQ(up.exponents_formula.size(), 2u);
  // Descending order: up = (0.5, -1), down = (1, -0.5).
  EXPECT_NEAR(up.exponents_formula[0], 0.5, 1e-12);
  EXPECT_NEAR(down.exponents_formula[0], -up.exponents_formula[1], 1e-12);
  EXPECT_NEAR(down.exponents_formula[1], -up.exponents_formula[0], 1e-12);
  EXPECT_NEAR(down.exponents_tangent[0], -up.exponents_tangent[1], 1e-3);
}

TEST(Lyapunov, FormulaAgreesWithTangentOnRandomTrajectories) {
  Rng rng(33);
  const SystemSpec sys = cat_system(FieldSpec::thermostat(mat_log_automorphism(m2(2, 1, 1, 1)), 0.5));
  for (int trial = 0; trial < 5; ++trial) {
    const Vector s = rng.on_sphere(3);
    const PhaseState p = PhaseState::make(Vector::Zero(2), 0.0, s.head(2), std::abs(s[2]));
    const LyapunovReport r = lyapunov_exponents(p, sys, {20.0, 120.0, 1.0}, tight());
    ASSERT_TRUE(r.converged);
    for (int i = 0; i < 2; ++i)
      EXPECT_TRUE(agree(r.exponents_formula[i], r.exponents_tangent[i]))
          << r.exponents_formula[i] << " vs " << r.exponents_tangent[i];
  }
}

TEST(InvariantDensity, Examples) {
  EXPECT_EQ(invariant_density(FieldSpec::linear(m2(1, 0, 0, -1)), 3.7), 1.0);
  const FieldSpec th = FieldSpec::thermostat(OperatorL(m2(1, 0, 0, -1)), 2.0);
  for (double u : {-1.0, 0.0, 0.5, 2.0}) EXPECT_NEAR(invariant_density(th, u), std::exp(u), 1e-14);
  PolynomialField p(2, 2);
  p.set_coefficient(0, {2, 0}, 1.0);
  EXPECT_THROW(invariant_density(FieldSpec::polynomial(p), 0.0), Unsupported);
}

TEST(InvariantDensity, TransportOfVolume) {
  // det DPsi^t(p) * rho(Psi^t p) = rho(p), the Jacobian by central differences.
  const OperatorL l(m2(1, 0, 0, -1));
  const FieldSpec f = FieldSpec::thermostat(l, 2.0);
  const SystemSpec sys = SystemSpec::make(l, f);
  Rng rng(35);
  for (int trial = 0; trial < 3; ++trial) {
    const Vector s = rng.on_sphere(3);
    const PhaseState p = PhaseState::make(v2(0.1, 0.2), 0.0, s.head(2), s[2]);
    const double t = 1.0;
    const Vector y = pack(p);
    const double h = 1e-5;
    Matrix jac(6, 6);
    for (int i = 0; i < 6; ++i) {
      Vector a = y, b = y;
      a[i] += h;
      b[i] -= h;
      jac.col(i) = (pack(flow(unpack(a, 2), sys, t, tight())) - pack(flow(unpack(b, 2), sys, t, tight()))) / (2 * h);
    }
    const PhaseState q = flow(p, sys, t, tight());
    const double lhs = jac.determinant() * invariant_density(f, q.group.u);
    EXPECT_NEAR(lhs, invariant_density(f, p.group.u), 1e-4);
  }
}

TEST(Resonance, Examples) {
  const auto a = resonance_search({1.0, -1.0}, 4);
  ASSERT_EQ(a.size(), 5u);
  for (int r = 0; r <= 4; ++r) {
    EXPECT_EQ(a[static_cast<std::size_t>(r)].r, (std::vector<int>{r, r}));
    EXPECT_EQ(a[static_cast<std::size_t>(r)].even, r % 2 == 0);
  }
  const auto b = resonance_search({1.0, -2.0}, 5);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].r, (std::vector<int>{1, 0}));
  EXPECT_EQ(b[1].r, (std::vector<int>{3, 1}));
  EXPECT_EQ(b[2].r, (std::vector<int>{5, 2}));
  EXPECT_TRUE(resonance_search({1.0, -std::sqrt(2.0)}, 12).empty());
}

TEST(Resonance, SolutionsSatisfyEquationAndGiveDensities) {
  const std::vector<std::vector<double>> spectra = {{1, -1}, {1, -2}, {2, -3}, {1, 1, -2}};
  for (const auto& lambda : spectra) {
    const int n = static_cast<int>(lambda.size());
    Matrix f = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) f(i, i) = lambda[static_cast<std::size_t>(i)];
    const FieldSpec fs = FieldSpec::linear(f);
    const auto grid = density_grid(n, n == 2 ? 25 : 11, 0.05);
    for (const auto& res : resonance_search(lambda, 4)) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += lambda[static_cast<std::size_t>(i)] * (res.r[static_cast<std::size_t>(i)] + 1);
      EXPECT_NEAR(sum, 0.0, 1e-12);
      EXPECT_LE(density_residual(MonomialDensity{res.r, std::nullopt}, fs, grid), 1e-9);
    }
  }
}

TEST(DensityResidual, Examples) {
  const FieldSpec f = FieldSpec::linear(m2(1, 0, 0, -1));
  const auto grid = density_grid(2, 41, 0.0);
  EXPECT_LE(density_residual(MonomialDensity{{2, 2}, std::nullopt}, f, grid), 1e-10);
  EXPECT_LE(density_residual(MonomialDensity{{0, 0}, std::nullopt}, FieldSpec::linear(m2(0, 1, -1, 0)), grid), 1e-15);
  const auto away = density_grid(2, 41, 0.1);
  EXPECT_LE(density_residual(SmoothedMonomialDensity{{2, 2}}, f, away), 1e-6);
  // A non-resonant monomial is not invariant.
  EXPECT_GT(density_residual(MonomialDensity{{2, 0}, std::nullopt}, f, grid), 1e-2);
}

TEST(DensityResidual, NonDiagonalBasis) {
  // F = V diag(1, -1) V^-1; the density is the monomial in eigen-coordinates.
  const Matrix v = m2(1, 1, 0, 1);
  const Matrix f = v * m2(1, 0, 0, -1) * v.inverse();
  const auto grid = density_grid(2, 31, 0.0);
  EXPECT_LE(density_residual(MonomialDensity{{2, 2}, v}, FieldSpec::linear(f), grid), 1e-9);
}

TEST(DensityGrid, RespectsBallAndMargin) {
  for (const auto& x : density_grid(3, 15, 0.1)) {
    EXPECT_LT(x.norm(), 1.0);
    EXPECT_GT(x.cwiseAbs().minCoeff(), 0.1);
  }
}
