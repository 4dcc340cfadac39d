#pragma once

#include <functional>

#include "lfsys/ode/trajectory.hpp"

namespace lfsys::ode {

/// dy/dt = f(t, y)
using Rhs = std::function<void(double t, const State& y, State& dydt)>;

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-12;
};

/// Adaptive Dormand-Prince 8(5,3) stepper with 7th-order dense output.
/// Always advances in increasing internal time; callers integrate backward by
/// handing it the sign-flipped right-hand side.
class Dop853 {
 public:
  Dop853(Rhs rhs, State y0, double t0, Tolerance tol, double max_step);

  /// Takes one accepted step that does not pass t_limit and fills `seg`.
  /// Throws IntegrationFailure on step-size underflow or non-finite stages.
  void step(double t_limit, DenseSegment& seg);

  double t() const { return t_; }
  const State& y() const { return y_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  double initial_step(double t_limit);
  void eval(double t, const State& y, State& out);

  Rhs rhs_;
  State y_;
  State f_;
  double t_;
  Tolerance tol_;
  double max_step_;
  double h_ = 0.0;
  double err_old_ = 1e-4;
  bool last_rejected_ = false;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t evaluations_ = 0;
  std::array<State, 16> k_;
  State ytmp_;
};

}  // namespace lfsys::ode
