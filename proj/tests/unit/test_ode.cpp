#include <cmath>

#include <gtest/gtest.h>

#include "lfsys/core/errors.hpp"
#include "lfsys/euler/euler.hpp"
#include "lfsys/ode/integrator.hpp"

using namespace lfsys;
using namespace lfsys::ode;

namespace {

Options tight(double tol = 1e-12) {
  Options o;
  o.tol = Tolerance{tol, tol};
  return o;
}

State s1(double x) { return State::Constant(1, x); }

Rhs oscillator() {
  return [](double, const State& y, State& d) {
    d.resize(2);
    d[0] = y[1];
    d[1] = -y[0];
  };
}

}  // namespace

TEST(Integrate, ZeroRhsIsConstant) {
  State y0(3);
  y0 << 1, -2, 3;
  const Trajectory tr = integrate([](double, const State& y, State& d) { d = State::Zero(y.size()); },
                                  y0, 0.0, 5.0, tight());
  for (const auto& y : tr.states()) EXPECT_EQ(y, y0);
  EXPECT_EQ(tr.at(2.5), y0);
}

TEST(Integrate, Exponential) {
  const Trajectory tr = integrate([](double, const State& y, State& d) { d = y; }, s1(1.0), 0.0, 1.0,
                                  tight());
  EXPECT_NEAR(tr.back()[0], std::exp(1.0), 1e-11);
}

TEST(Integrate, LinearExactSolutionWithinHundredTol) {
  for (double tol : {1e-8, 1e-10, 1e-12}) {
    const Trajectory tr = integrate(oscillator(), State::Unit(2, 0), 0.0, 10.0, tight(tol));
    const double err = std::max(std::abs(tr.back()[0] - std::cos(10.0)),
                                std::abs(tr.back()[1] + std::sin(10.0)));
    EXPECT_LE(err, 100 * tol) << tol;
  }
}

TEST(Integrate, BackwardTime) {
  const Trajectory tr = integrate(oscillator(), State::Unit(2, 0), 0.0, -10.0, tight());
  EXPECT_NEAR(tr.front()[0], std::cos(-10.0), 1e-10);
  EXPECT_EQ(tr.t_first(), -10.0);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_LT(tr.times()[i - 1], tr.times()[i]);
}

TEST(Integrate, DenseOutputAccuracy) {
  const Trajectory tr = integrate(oscillator(), State::Unit(2, 0), 0.0, 10.0, tight());
  double worst = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = 10.0 * k / 1000;
    worst = std::max(worst, std::abs(tr.at(t)[0] - std::cos(t)));
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_EQ(tr.states().size(), tr.times().size());
}

TEST(Integrate, SkewEulerKeepsEta) {
  Matrix f(2, 2);
  f << 0, 1, -1, 0;
  State y0(3);
  y0 << 0.6, 0.0, 0.8;
  const Trajectory tr = integrate(euler_system(FieldSpec::linear(f)), y0, 0.0, 100.0, tight());
  for (const auto& y : tr.states()) EXPECT_NEAR(y[2], 0.8, 1e-14);
}

TEST(Integrate, StepUnderflowCarriesLastState) {
  // y' = y^2 blows up at t = 1.
  try {
    integrate([](double, const State& y, State& d) { d = y.cwiseProduct(y); }, s1(1.0), 0.0, 2.0,
              tight());
    FAIL() << "expected IntegrationFailure";
  } catch (const IntegrationFailure& e) {
    EXPECT_NEAR(e.last_time(), 1.0, 1e-6);
    ASSERT_EQ(e.last_state().size(), 1);
    EXPECT_GT(std::abs(e.last_state()[0]), 1e6);
  }
}

TEST(Event, UnitCrossing) {
  EventSpec ev{[](const State& y) { return y[0] - 1.0; }, Direction::Rising, 1e-12};
  const EventResult r = integrate_to_event([](double, const State&, State& d) { d = s1(1.0); },
                                           s1(0.0), 0.0, 5.0, {ev}, tight());
  ASSERT_TRUE(r.hit);
  EXPECT_NEAR(r.hit->t, 1.0, 1e-12);
}

TEST(Event, SaddleExitTime) {
  Matrix f(2, 2);
  f << 1, 0, 0, -1;
  State z0(2);
  z0 << 0.5, 0.5;
  EventSpec ev{[](const State& y) { return y.squaredNorm() - 1.0; }, Direction::Rising, 1e-14};
  const EventResult r =
      integrate_to_event(field_system(FieldSpec::linear(f)), z0, 0.0, 10.0, {ev}, tight());
  ASSERT_TRUE(r.hit);
  EXPECT_NEAR(r.hit->t, 0.5 * std::log(2.0 + std::sqrt(3.0)), 1e-9);
}

TEST(Event, EquatorCrossingLandsOnUnitXi) {
  Matrix f(2, 2);
  f << 1, 0.3, -0.2, -1;
  State y0(3);
  y0 << 0.3, 0.1, std::sqrt(1 - 0.09 - 0.01);
  EventSpec ev{[](const State& y) { return y[2]; }, Direction::Falling, 1e-13};
  const EventResult r =
      integrate_to_event(euler_system(FieldSpec::linear(f)), y0, 0.0, 100.0, {ev}, tight());
  ASSERT_TRUE(r.hit);
  EXPECT_NEAR(r.hit->y.head(2).norm(), 1.0, 1e-8);
}

TEST(Event, RefinementProperties) {
  EventSpec ev{[](const State& y) { return y[0] - 0.3; }, Direction::Any, 1e-12};
  const EventResult r = integrate_to_event(oscillator(), State::Unit(2, 0), 0.0, 10.0, {ev}, tight());
  ASSERT_TRUE(r.hit);
  EXPECT_LE(std::abs(r.hit->value), 1e-12);
  // The event run stops at the hit; bracket the sign change on an uncut run.
  const Trajectory full = integrate(oscillator(), State::Unit(2, 0), 0.0, 10.0, tight());
  EXPECT_LE(r.hit->bracket_lo, r.hit->t);
  EXPECT_GE(r.hit->bracket_hi, r.hit->t);
  const double lo = ev.function(full.at(r.hit->bracket_lo));
  const double hi = ev.function(full.at(r.hit->bracket_hi));
  EXPECT_LE(lo * hi, 0.0);
  EXPECT_NEAR(r.hit->t, std::acos(0.3), 1e-11);
}

TEST(Event, NoHitIsNotAnError) {
  EventSpec ev{[](const State& y) { return y[0] - 10.0; }, Direction::Rising, 1e-12};
  const EventResult r = integrate_to_event(oscillator(), State::Unit(2, 0), 0.0, 10.0, {ev}, tight());
  EXPECT_FALSE(r.hit);
  EXPECT_EQ(r.trajectory.t_last(), 10.0);
}

TEST(ImplicitMidpoint, ForwardBackwardReturns) {
  const Rhs rhs = [](double, const State& y, State& d) {
    d.resize(2);
    d[0] = y[1];
    d[1] = -std::sin(y[0]);
  };
  State y(2);
  y << 1.0, 0.2;
  for (double h : {1e-3, 1e-2, 5e-2}) {
    const State a = implicit_midpoint_step(rhs, 0.0, y, h);
    const State b = implicit_midpoint_step(rhs, h, a, -h);
    EXPECT_LT((b - y).cwiseAbs().maxCoeff(), 1e-12) << h;
  }
}

TEST(ImplicitMidpoint, SchemeSelectable) {
  Options o;
  o.scheme = Scheme::ImplicitMidpoint;
  o.fixed_step = 1e-3;
  const Trajectory tr = integrate(oscillator(), State::Unit(2, 0), 0.0, 10.0, o);
  EXPECT_NEAR(tr.back().norm(), 1.0, 1e-12);  // quadratic invariant kept by the scheme
  EXPECT_NEAR(tr.back()[0], std::cos(10.0), 1e-4);
}
