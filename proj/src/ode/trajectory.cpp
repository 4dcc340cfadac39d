#include "lfsys/ode/trajectory.hpp"

#include <algorithm>

#include "lfsys/core/errors.hpp"

namespace lfsys::ode {

State DenseSegment::eval(double t) const {
  const double span = t_end - t_begin;
  const double s = span == 0.0 ? 0.0 : (t - t_begin) / span;
  const double s1 = 1.0 - s;
  const auto& r = coeffs;
  if (r[4].size() == 0) {
    return r[0] + s * (r[1] + s1 * (r[2] + s * r[3]));
  }
  return r[0] +
         s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * (r[4] + s * (r[5] + s1 * (r[6] + s * r[7]))))));
}

DenseSegment DenseSegment::hermite(double t0, const State& y0, const State& f0, double t1,
                                   const State& y1, const State& f1) {
  DenseSegment seg;
  const double h = t1 - t0;
  seg.t_begin = t0;
  seg.t_end = t1;
  seg.coeffs[0] = y0;
  seg.coeffs[1] = y1 - y0;
  seg.coeffs[2] = h * f0 - seg.coeffs[1];
  seg.coeffs[3] = seg.coeffs[1] - h * f1 - seg.coeffs[2];
  return seg;
}

void Trajectory::start(double t, const State& y) {
  times_.assign(1, t);
  states_.assign(1, y);
  segments_.clear();
}

void Trajectory::push(const DenseSegment& seg, double t, const State& y) {
  times_.push_back(t);
  states_.push_back(y);
  segments_.push_back(seg);
}

void Trajectory::push(const DenseSegment& seg) { push(seg, seg.t_end, seg.end()); }

void Trajectory::push_endpoint(double t, const State& y) {
  times_.push_back(t);
  states_.push_back(y);
}

void Trajectory::finalize_backward() {
  std::reverse(times_.begin(), times_.end());
  std::reverse(states_.begin(), states_.end());
  std::reverse(segments_.begin(), segments_.end());
}

State Trajectory::at(double t) const {
  if (times_.empty()) throw InvalidInput("empty trajectory");
  const double lo = times_.front();
  const double hi = times_.back();
  if (t < lo || t > hi) throw InvalidInput("time outside trajectory range");
  if (t == lo) return states_.front();
  if (t == hi) return states_.back();
  if (segments_.size() + 1 != times_.size()) {
    throw InvalidInput("trajectory was recorded without dense output");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  auto idx = static_cast<std::size_t>(it - times_.begin()) - 1;
  idx = std::min(idx, segments_.size() - 1);
  return segments_[idx].eval(t);
}

}  // namespace lfsys::ode
