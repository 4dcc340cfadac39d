#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lfsys/ode/dop853.hpp"

namespace lfsys::ode {

enum class Scheme {
  DormandPrince853,
  /// Fixed-step implicit midpoint rule: symmetric, so a step forward followed
  /// by the same step backward returns to the start.
  ImplicitMidpoint,
};

struct Options {
  Tolerance tol;
  Scheme scheme = Scheme::DormandPrince853;
  double fixed_step = 1e-2;
  double max_step = 0.0;  // 0: unlimited
  std::size_t max_steps = 50'000'000;
  bool record = true;     // keep every step in the returned trajectory
};

/// Called once per accepted step with its dense segment.
using StepObserver = std::function<void(const DenseSegment&)>;

/// Integrates from t0 to t1 (either direction). When options.record is false
/// the returned trajectory holds only the two endpoints.
Trajectory integrate(const Rhs& rhs, const State& y0, double t0, double t1,
                     const Options& options = {}, const StepObserver& observer = {});

enum class Direction { Rising, Falling, Any };

struct EventSpec {
  std::function<double(const State&)> function;
  Direction direction = Direction::Any;
  double tolerance = 1e-12;  // in event-function value
};

struct EventHit {
  std::size_t index = 0;
  double t = 0.0;
  State y;
  double value = 0.0;    // event function at y
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct EventResult {
  Trajectory trajectory;
  std::optional<EventHit> hit;
};

/// Integrates from t0 toward t_end and stops at the first crossing of any
/// event. Crossings are bracketed per step and refined on the dense output.
/// Reaching t_end without a crossing is a no-hit result, not an error.
EventResult integrate_to_event(const Rhs& rhs, const State& y0, double t0, double t_end,
                               const std::vector<EventSpec>& events,
                               const Options& options = {},
                               const StepObserver& observer = {});

/// Single implicit-midpoint step of size h (negative h steps backward).
State implicit_midpoint_step(const Rhs& rhs, double t, const State& y, double h);

}  // namespace lfsys::ode
