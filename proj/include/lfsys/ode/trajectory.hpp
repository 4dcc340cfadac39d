#pragma once

#include <array>
#include <vector>

#include "lfsys/core/linalg.hpp"

namespace lfsys::ode {

using State = Vector;

/// Continuous extension of one accepted step on [t_begin, t_end] (either
/// orientation). With s = (t - t_begin) / (t_end - t_begin) and s1 = 1 - s,
///   y(s) = c0 + s(c1 + s1(c2 + s(c3 + s1(c4 + s(c5 + s1(c6 + s c7)))))).
/// c4..c7 vanish for the cubic Hermite fallback.
struct DenseSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::array<State, 8> coeffs;

  State eval(double t) const;
  double t_lo() const { return t_begin < t_end ? t_begin : t_end; }
  double t_hi() const { return t_begin < t_end ? t_end : t_begin; }
  const State& start() const { return coeffs[0]; }
  State end() const { return coeffs[0] + coeffs[1]; }

  /// Cubic Hermite segment from endpoint values and derivatives.
  static DenseSegment hermite(double t0, const State& y0, const State& f0, double t1,
                              const State& y1, const State& f1);
};

/// Accepted step points with their dense output. Times are stored strictly
/// increasing regardless of the integration direction.
class Trajectory {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<DenseSegment>& segments() const { return segments_; }

  bool empty() const { return times_.empty(); }
  std::size_t size() const { return times_.size(); }
  double t_first() const { return times_.front(); }
  double t_last() const { return times_.back(); }
  const State& front() const { return states_.front(); }
  const State& back() const { return states_.back(); }

  /// Dense evaluation at any t in [t_first, t_last].
  State at(double t) const;

  // Builders used by the integrators.
  void start(double t, const State& y);
  void push(const DenseSegment& seg);
  /// Appends a segment that ends early at (t, y), e.g. at an event.
  void push(const DenseSegment& seg, double t, const State& y);
  /// Appends a point without dense output (endpoint-only runs).
  void push_endpoint(double t, const State& y);
  /// Reorders a backward run so that times increase.
  void finalize_backward();

 private:
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<DenseSegment> segments_;
};

}  // namespace lfsys::ode
