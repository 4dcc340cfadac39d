#include "lfsys/models/metric.hpp"

#include <algorithm>
#include <cmath>

// pchip.hpp calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "lfsys/core/errors.hpp"

namespace lfsys {

const char* end_limit_name(EndLimit e) {
  switch (e) {
    case EndLimit::Zero:
      return "zero";
    case EndLimit::Positive:
      return "positive";
    case EndLimit::Infinite:
      return "infinite";
  }
  return "?";
}

struct Tabulated::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

Tabulated::Tabulated(std::vector<double> x, std::vector<double> y, EndLimit at_a, EndLimit at_b)
    : x_(x), at_a_(at_a), at_b_(at_b) {
  if (x.size() < 4 || x.size() != y.size()) {
    throw InvalidInput("tabulated alpha: need at least 4 samples of equal length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidInput("tabulated alpha: non-finite sample");
    if (!(y[i] > 0.0)) throw InvalidInput("tabulated alpha: values must be positive");
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidInput("tabulated alpha: abscissae must increase");
  }
  impl_ = std::make_shared<Impl>(Impl{boost::math::interpolators::pchip<std::vector<double>>(
      std::move(x), std::move(y))});
}

double Tabulated::value(double x0) const {
  if (x0 < x_.front() || x0 > x_.back()) throw DomainError("tabulated alpha: x0 outside the table");
  return impl_->spline(x0);
}

double Tabulated::derivative(double x0) const {
  if (x0 < x_.front() || x0 > x_.back()) throw DomainError("tabulated alpha: x0 outside the table");
  return impl_->spline.prime(x0);
}

double MetricSpec::alpha(int j, double x0) const {
  const auto& prof = alphas.at(static_cast<std::size_t>(j));
  if (const auto* pw = std::get_if<PowerLaw>(&prof)) return std::pow(x0, pw->tau);
  return std::get<Tabulated>(prof).value(x0);
}

double MetricSpec::alpha_prime(int j, double x0) const {
  const auto& prof = alphas.at(static_cast<std::size_t>(j));
  if (const auto* pw = std::get_if<PowerLaw>(&prof)) return pw->tau * std::pow(x0, pw->tau - 1.0);
  return std::get<Tabulated>(prof).derivative(x0);
}

EndLimit MetricSpec::limit_at_a(int j) const {
  const auto& prof = alphas.at(static_cast<std::size_t>(j));
  if (const auto* t = std::get_if<Tabulated>(&prof)) return t->at_a();
  const double tau = std::get<PowerLaw>(prof).tau;
  if (a > 0.0 || tau == 0.0) return EndLimit::Positive;
  return tau > 0.0 ? EndLimit::Zero : EndLimit::Infinite;
}

EndLimit MetricSpec::limit_at_b(int j) const {
  const auto& prof = alphas.at(static_cast<std::size_t>(j));
  if (const auto* t = std::get_if<Tabulated>(&prof)) return t->at_b();
  const double tau = std::get<PowerLaw>(prof).tau;
  if (std::isfinite(b) || tau == 0.0) return EndLimit::Positive;
  return tau > 0.0 ? EndLimit::Infinite : EndLimit::Zero;
}

void MetricSpec::validate() const {
  if (alphas.empty()) throw InvalidInput("metric: no alpha profiles");
  if (std::isnan(a) || std::isnan(b) || !(a < b)) throw InvalidInput("metric: need a < b");
  for (const auto& prof : alphas) {
    if (const auto* pw = std::get_if<PowerLaw>(&prof)) {
      if (!std::isfinite(pw->tau)) throw InvalidInput("metric: non-finite tau");
      if (a < 0.0) throw InvalidInput("metric: power-law alphas need a >= 0");
    } else {
      const auto& t = std::get<Tabulated>(prof);
      if (t.x_min() < a || t.x_max() > b) {
        throw InvalidInput("metric: tabulated alpha extends beyond (a, b)");
      }
    }
  }
}

Vector pack(const GeodesicState& s) {
  const auto n = s.x.size();
  Vector y(2 * n + 2);
  y << s.x, s.x0, s.p, s.p0;
  return y;
}

GeodesicState unpack_geodesic(const Vector& y, int n) {
  GeodesicState s;
  s.x = y.head(n);
  s.x0 = y[n];
  s.p = y.segment(n + 1, n);
  s.p0 = y[2 * n + 1];
  return s;
}

namespace {

// alpha_j^-2 and alpha_j^-3 alpha_j', in closed form for power laws.
void metric_terms(const MetricSpec& m, int j, double x0, double& inv2, double& force) {
  const auto& prof = m.alphas[static_cast<std::size_t>(j)];
  if (const auto* pw = std::get_if<PowerLaw>(&prof)) {
    inv2 = std::pow(x0, -2.0 * pw->tau);
    force = pw->tau * std::pow(x0, -2.0 * pw->tau - 1.0);
    return;
  }
  const auto& t = std::get<Tabulated>(prof);
  const double al = t.value(x0);
  inv2 = 1.0 / (al * al);
  force = t.derivative(x0) / (al * al * al);
}

}  // namespace

double hamiltonian(const GeodesicState& s, const MetricSpec& m) {
  double h = s.p0 * s.p0;
  for (int j = 0; j < m.dim(); ++j) {
    if (s.p[j] == 0.0) continue;
    double inv2 = 0.0;
    double force = 0.0;
    metric_terms(m, j, s.x0, inv2, force);
    h += inv2 * s.p[j] * s.p[j];
  }
  return 0.5 * h;
}

GeodesicState geodesic_rhs(const GeodesicState& s, const MetricSpec& m) {
  const int n = m.dim();
  if (s.x.size() != n || s.p.size() != n) throw InvalidInput("geodesic: dimension mismatch");
  GeodesicState d;
  d.x = Vector::Zero(n);
  d.p = Vector::Zero(n);
  d.x0 = s.p0;
  d.p0 = 0.0;
  for (int j = 0; j < n; ++j) {
    if (s.p[j] == 0.0) continue;
    double inv2 = 0.0;
    double force = 0.0;
    metric_terms(m, j, s.x0, inv2, force);
    d.x[j] = inv2 * s.p[j];
    d.p0 += force * s.p[j] * s.p[j];
  }
  return d;
}

ode::Rhs geodesic_system(const MetricSpec& m) {
  const int n = m.dim();
  return [m, n](double, const ode::State& y, ode::State& dy) {
    dy = pack(geodesic_rhs(unpack_geodesic(y, n), m));
  };
}

GeodesicRun geodesic_simulate(const GeodesicState& s0, const MetricSpec& m, double t,
                              const ode::Tolerance& tol, bool record) {
  m.validate();
  const int n = m.dim();
  if (!(s0.x0 > m.a && s0.x0 < m.b)) throw InvalidInput("geodesic: x0 must lie in (a, b)");
  GeodesicRun run;
  const double h0 = hamiltonian(s0, m);
  run.x0_min = run.x0_max = s0.x0;

  std::vector<ode::EventSpec> events;
  std::vector<std::string> sides;
  if (std::isfinite(m.a)) {
    const double a = m.a;
    events.push_back({[n, a](const ode::State& y) { return y[n] - a; }, ode::Direction::Falling, 1e-12});
    sides.emplace_back("a");
  }
  if (std::isfinite(m.b)) {
    const double b = m.b;
    events.push_back({[n, b](const ode::State& y) { return b - y[n]; }, ode::Direction::Falling, 1e-12});
    sides.emplace_back("b");
  }

  ode::Options opt;
  opt.tol = tol;
  opt.record = record;
  auto observe = [&](const ode::DenseSegment& seg) {
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
      const ode::State y = s == 1.0 ? seg.end() : seg.eval(seg.t_begin + s * (seg.t_end - seg.t_begin));
      run.x0_min = std::min(run.x0_min, y[n]);
      run.x0_max = std::max(run.x0_max, y[n]);
    }
    const ode::State y = seg.end();
    const GeodesicState g = unpack_geodesic(y, n);
    if (g.x0 > m.a && g.x0 < m.b) {
      run.h_drift = std::max(run.h_drift, std::abs(hamiltonian(g, m) - h0));
    }
    run.p_drift = std::max(run.p_drift, (g.p - s0.p).lpNorm<Eigen::Infinity>());
  };
  auto res = ode::integrate_to_event(geodesic_system(m), pack(s0), 0.0, t, events, opt, observe);
  run.trajectory = std::move(res.trajectory);
  if (res.hit) {
    run.exit_time = res.hit->t;
    run.exit_side = sides[res.hit->index];
  }
  return run;
}

CompactLevel check_compact_level(const MetricSpec& m, const Vector& p, double h_value) {
  m.validate();
  const int n = m.dim();
  if (p.size() != n) throw InvalidInput("check_compact_level: momentum dimension mismatch");
  if (!(h_value > 0.0)) throw InvalidInput("check_compact_level: H must be positive");

  std::vector<int> at_a;
  std::vector<int> at_b;
  for (int j = 0; j < n; ++j) {
    if (p[j] == 0.0) continue;
    if (m.limit_at_a(j) == EndLimit::Zero) at_a.push_back(j);
    if (m.limit_at_b(j) == EndLimit::Zero) at_b.push_back(j);
  }
  CompactLevel out;
  if (at_a.empty() || at_b.empty()) {
    out.side = at_a.empty() && at_b.empty() ? "both" : (at_a.empty() ? "a" : "b");
    return out;
  }
  out.compact = true;
  for (int i : at_a)
    for (int l : at_b)
      if (i != l) out.pairs.emplace_back(i, l);
  if (out.pairs.empty()) {
    // A single profile vanishing at both ends confines on its own.
    for (int i : at_a)
      if (std::find(at_b.begin(), at_b.end(), i) != at_b.end()) out.pairs.emplace_back(i, i);
  }

  // Sampling range: the interval itself, narrowed to the tables if any.
  double lo = m.a;
  double hi = m.b;
  for (const auto& prof : m.alphas)
    if (const auto* t = std::get_if<Tabulated>(&prof)) {
      lo = std::max(lo, t->x_min());
      hi = std::min(hi, t->x_max());
    }
  auto x_of = [lo, hi](double s) {
    if (std::isfinite(lo) && std::isfinite(hi)) return lo + (hi - lo) * s;
    if (std::isfinite(lo)) return lo + std::exp(-40.0 + 80.0 * s);
    if (std::isfinite(hi)) return hi - std::exp(40.0 - 80.0 * s);
    return std::sinh(80.0 * (s - 0.5));
  };
  const double level = 2.0 * h_value;
  auto admissible = [&](double s) {
    const double x = x_of(s);
    if (!(x > m.a && x < m.b)) return false;
    for (const auto& [i, l] : out.pairs) {
      double g = 0.0;
      for (int j : {i, l}) {
        double inv2 = 0.0;
        double force = 0.0;
        metric_terms(m, j, x, inv2, force);
        g += inv2 * p[j] * p[j];
        if (i == l) break;
      }
      if (!(g <= level)) return false;
    }
    return true;
  };

  constexpr int kSamples = 4000;
  int first = -1;
  int last = -1;
  for (int k = 1; k < kSamples; ++k) {
    if (admissible(static_cast<double>(k) / kSamples)) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) {
    out.empty = true;
    return out;
  }
  auto edge = [&](double in, double out_s) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + out_s);
      if (mid == in || mid == out_s) break;
      (admissible(mid) ? in : out_s) = mid;
    }
    return in;
  };
  out.lo = x_of(edge(static_cast<double>(first) / kSamples, static_cast<double>(first - 1) / kSamples));
  out.hi = x_of(edge(static_cast<double>(last) / kSamples, static_cast<double>(last + 1) / kSamples));
  return out;
}

}  // namespace lfsys
