#include "lfsys/ode/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "lfsys/core/errors.hpp"

namespace lfsys::ode {
namespace {

// Produces consecutive dense segments in real time, whatever the direction.
class Stepper {
 public:
  Stepper(const Rhs& rhs, const State& y0, double t0, double t1, const Options& opt)
      : rhs_(rhs), t0_(t0), t1_(t1), dir_(t1 >= t0 ? 1.0 : -1.0), opt_(opt), y_(y0) {
    if (opt.scheme == Scheme::DormandPrince853) {
      Rhs internal = [this](double tau, const State& y, State& dy) {
        rhs_(t0_ + dir_ * tau, y, dy);
        if (dir_ < 0.0) dy = -dy;
      };
      dop_ = std::make_unique<Dop853>(internal, y0, 0.0, opt.tol, opt.max_step);
    } else {
      if (!(opt.fixed_step > 0.0)) throw InvalidInput("fixed step must be positive");
      const double span = std::abs(t1 - t0);
      steps_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / opt.fixed_step)));
      h_ = (t1 - t0) / static_cast<double>(steps_);
      f_.resize(y0.size());
      rhs_(t0, y0, f_);
    }
  }

  void next(DenseSegment& seg) {
    if (++count_ > opt_.max_steps) {
      throw IntegrationFailure("step budget exhausted", t_real(), y_);
    }
    if (dop_) {
      const double span = std::abs(t1_ - t0_);
      dop_->step(span, seg);
      seg.t_begin = t0_ + dir_ * seg.t_begin;
      seg.t_end = dop_->t() >= span ? t1_ : t0_ + dir_ * seg.t_end;
      y_ = dop_->y();
      finished_ = dop_->t() >= span;
    } else {
      const double ta = t0_ + static_cast<double>(count_ - 1) * h_;
      const double tb = count_ == steps_ ? t1_ : t0_ + static_cast<double>(count_) * h_;
      State y1 = implicit_midpoint_step(rhs_, ta, y_, tb - ta);
      State f1(y1.size());
      rhs_(tb, y1, f1);
      seg = DenseSegment::hermite(ta, y_, f_, tb, y1, f1);
      y_ = std::move(y1);
      f_ = std::move(f1);
      finished_ = count_ == steps_;
    }
  }

  bool finished() const { return finished_; }
  double direction() const { return dir_; }

 private:
  double t_real() const { return dop_ ? t0_ + dir_ * dop_->t() : t0_ + count_ * h_; }

  const Rhs& rhs_;
  double t0_;
  double t1_;
  double dir_;
  const Options& opt_;
  State y_;
  State f_;
  std::unique_ptr<Dop853> dop_;
  std::size_t steps_ = 0;
  std::size_t count_ = 0;
  double h_ = 0.0;
  bool finished_ = false;
};

void check_inputs(const State& y0, double t0, double t1) {
  if (!y0.allFinite() || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw InvalidInput("non-finite integration input");
  }
}

bool crosses(Direction d, double g0, double g1) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (d) {
    case Direction::Rising:
      return rising;
    case Direction::Falling:
      return falling;
    case Direction::Any:
      return rising || falling;
  }
  return false;
}

struct Root {
  double t;
  State y;
  double g;
  double lo;
  double hi;
};

// Illinois false position on the dense output between ta (value ga) and tb
// (value gb), falling back to bisection when the secant stalls.
Root refine(const DenseSegment& seg, const EventSpec& ev, double ta, double ga, double tb,
            double gb) {
  const double eps = std::numeric_limits<double>::epsilon();
  State yb = seg.eval(tb);
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(gb) <= ev.tolerance) break;
    const double width = std::abs(tb - ta);
    if (width <= 4.0 * eps * std::max(1.0, std::abs(tb))) break;
    double tm = tb - gb * (tb - ta) / (gb - ga);
    const double lo = std::min(ta, tb);
    const double hi = std::max(ta, tb);
    if (!(tm > lo && tm < hi) || it % 8 == 7) tm = 0.5 * (ta + tb);
    State ym = seg.eval(tm);
    const double gm = ev.function(ym);
    if ((gm < 0.0) == (gb < 0.0) && gm != 0.0) {
      // Same side as b: replace b, halve the retained endpoint weight.
      tb = tm;
      gb = gm;
      yb = std::move(ym);
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      ta = tb;
      ga = gb;
      tb = tm;
      gb = gm;
      yb = std::move(ym);
      side = +1;
      if (gm == 0.0) break;
    }
  }
  return Root{tb, yb, gb, std::min(ta, tb), std::max(ta, tb)};
}

}  // namespace

State implicit_midpoint_step(const Rhs& rhs, double t, const State& y, double h) {
  const double tm = t + 0.5 * h;
  State k(y.size());
  rhs(t, y, k);
  State y1 = y + h * k;
  State mid(y.size());
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (y + y1);
    rhs(tm, mid, k);
    State next = y + h * k;
    const double change = (next - y1).lpNorm<Eigen::Infinity>();
    y1 = std::move(next);
    if (change <= 1e-15 * std::max(1.0, y1.lpNorm<Eigen::Infinity>())) return y1;
    if (!y1.allFinite()) break;
  }
  throw IntegrationFailure("implicit midpoint iteration did not converge", t, y);
}

Trajectory integrate(const Rhs& rhs, const State& y0, double t0, double t1,
                     const Options& options, const StepObserver& observer) {
  check_inputs(y0, t0, t1);
  Trajectory traj;
  traj.start(t0, y0);
  if (t1 == t0) return traj;
  Stepper stepper(rhs, y0, t0, t1, options);
  DenseSegment seg;
  while (!stepper.finished()) {
    stepper.next(seg);
    if (observer) observer(seg);
    if (options.record) traj.push(seg);
  }
  if (!options.record) {
    Trajectory ends;
    ends.start(t0, y0);
    ends.push_endpoint(t1, seg.end());
    traj = std::move(ends);
  }
  if (stepper.direction() < 0.0) traj.finalize_backward();
  return traj;
}

EventResult integrate_to_event(const Rhs& rhs, const State& y0, double t0, double t_end,
                               const std::vector<EventSpec>& events, const Options& options,
                               const StepObserver& observer) {
  check_inputs(y0, t0, t_end);
  EventResult result;
  result.trajectory.start(t0, y0);
  if (t_end == t0) return result;

  Stepper stepper(rhs, y0, t0, t_end, options);
  std::vector<double> g(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g[i] = events[i].function(y0);

  // Interior samples per step so that a pair of crossings inside one long
  // step is not missed.
  constexpr int kSamples = 4;
  DenseSegment seg;
  State y_last = y0;
  double t_last = t0;
  while (!stepper.finished()) {
    stepper.next(seg);
    if (observer) observer(seg);

    std::optional<Root> best;
    std::size_t best_index = 0;
    double ta = seg.t_begin;
    std::vector<double> ga = g;
    for (int k = 1; k <= kSamples && !best; ++k) {
      const double tb = k == kSamples ? seg.t_end
                                      : seg.t_begin + (seg.t_end - seg.t_begin) * k / kSamples;
      State yb = k == kSamples ? seg.end() : seg.eval(tb);
      for (std::size_t i = 0; i < events.size(); ++i) {
        const double gb = events[i].function(yb);
        if (crosses(events[i].direction, ga[i], gb)) {
          Root r = refine(seg, events[i], ta, ga[i], tb, gb);
          const double along = stepper.direction() * (r.t - t0);
          if (!best || along < stepper.direction() * (best->t - t0)) {
            best = std::move(r);
            best_index = i;
          }
        }
        ga[i] = gb;
      }
      ta = tb;
    }

    if (best) {
      if (options.record) {
        result.trajectory.push(seg, best->t, best->y);
      } else {
        result.trajectory.push_endpoint(best->t, best->y);
      }
      EventHit hit;
      hit.index = best_index;
      hit.t = best->t;
      hit.y = best->y;
      hit.value = best->g;
      hit.bracket_lo = best->lo;
      hit.bracket_hi = best->hi;
      result.hit = std::move(hit);
      break;
    }
    g = std::move(ga);
    if (options.record) result.trajectory.push(seg);
    y_last = seg.end();
    t_last = seg.t_end;
  }
  if (!result.hit && !options.record) result.trajectory.push_endpoint(t_last, y_last);
  if (stepper.direction() < 0.0) result.trajectory.finalize_backward();
  return result;
}

}  // namespace lfsys::ode
