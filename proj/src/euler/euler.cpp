#include "lfsys/euler/euler.hpp"

#include <algorithm>
#include <cmath>

#include "lfsys/core/errors.hpp"

namespace lfsys {

AlgebraPoint euler_rhs(const AlgebraPoint& v, const FieldSpec& f, double slack) {
  const Vector fx = f.eval(v.xi, slack);
  return AlgebraPoint{v.eta * fx, -fx.dot(v.xi)};
}

ode::Rhs euler_system(const FieldSpec& f) {
  const int n = f.dim();
  return [f, n](double, const ode::State& y, ode::State& dy) {
    dy.resize(n + 1);
    const auto xi = y.head(n);
    const Vector fx = f.eval_unchecked(xi);
    dy.head(n) = y[n] * fx;
    dy[n] = -fx.dot(xi);
  };
}

ode::Rhs euler_u_system(const FieldSpec& f) {
  const int n = f.dim();
  return [f, n](double, const ode::State& y, ode::State& dy) {
    dy.resize(n + 2);
    const auto xi = y.head(n);
    const Vector fx = f.eval_unchecked(xi);
    dy.head(n) = y[n] * fx;
    dy[n] = -fx.dot(xi);
    dy[n + 1] = y[n];
  };
}

ode::Rhs field_system(const FieldSpec& f) {
  return [f](double, const ode::State& y, ode::State& dy) { dy = f.eval_unchecked(y); };
}

ode::Options integration_options(const Tolerances& tol) {
  ode::Options opt;
  opt.tol.abs = tol.ode_abs;
  opt.tol.rel = tol.ode_rel;
  return opt;
}

int PeriodicOrbit::dim() const {
  return samples.empty() ? 0 : static_cast<int>(samples.front().size()) - 2;
}

AlgebraPoint PeriodicOrbit::state_at(double t) const {
  const int n = dim();
  const Vector y = samples.at(t);
  return AlgebraPoint{y.head(n), y[n]};
}

double PeriodicOrbit::u_at(double t) const { return samples.at(t)[dim() + 1]; }

std::vector<std::pair<double, double>> PeriodicOrbit::u_profile() const {
  std::vector<std::pair<double, double>> out;
  const int n = dim();
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.emplace_back(samples.times()[i], samples.states()[i][n + 1]);
  return out;
}

PeriodicOrbit build_periodic_orbit(const EscapeResult& esc, const FieldSpec& f,
                                   const Tolerances& tol) {
  if (esc.verdict != Verdict::Escaping) {
    throw InvalidInput("build_periodic_orbit: escape result is not Escaping");
  }
  const int n = f.dim();
  if (esc.exit_minus.size() != n) throw InvalidInput("build_periodic_orbit: dimension mismatch");

  ode::State y0(n + 2);
  y0.head(n) = esc.exit_minus;
  y0[n] = 0.0;
  y0[n + 1] = esc.s_minus;

  const ode::Rhs rhs = euler_u_system(f);
  ode::Options opt = integration_options(tol);
  opt.record = false;
  ode::EventSpec equator{[n](const ode::State& y) { return y[n]; }, ode::Direction::Falling,
                         tol.event};
  auto half = ode::integrate_to_event(rhs, y0, 0.0, tol.horizon, {equator}, opt);
  if (!half.hit) {
    throw ConstructionFailure(
        "build_periodic_orbit: no return to the equator within the horizon");
  }

  PeriodicOrbit orbit;
  orbit.t0 = half.hit->t;
  orbit.period = 2.0 * orbit.t0;
  orbit.s_minus = esc.s_minus;
  orbit.s_plus = esc.s_plus;
  orbit.arrival_defect = (half.hit->y.head(n) - esc.exit_plus).norm();
  if (!(orbit.arrival_defect <= tol.orbit_arrival)) {
    throw ConstructionFailure("build_periodic_orbit: arrival point misses exit_plus by " +
                              std::to_string(orbit.arrival_defect));
  }

  // The whole period is integrated directly, so closure and the odd symmetry
  // of eta are measured rather than imposed.
  opt.record = true;
  orbit.samples = ode::integrate(rhs, y0, 0.0, orbit.period, opt);
  const ode::State& end = orbit.samples.back();
  orbit.closure_defect = (end.head(n + 1) - y0.head(n + 1)).norm();

  constexpr int kProbe = 256;
  double sym = 0.0;
  for (int i = 0; i <= kProbe; ++i) {
    const double t = orbit.period * i / kProbe;
    const double tr = std::max(0.0, orbit.period - t);
    const Vector a = orbit.samples.at(t);
    const Vector b = orbit.samples.at(tr);
    sym = std::max(sym, std::abs(a[n] + b[n]));
    sym = std::max(sym, (a.head(n) - b.head(n)).lpNorm<Eigen::Infinity>());
  }
  orbit.symmetry_defect = sym;
  return orbit;
}

}  // namespace lfsys
