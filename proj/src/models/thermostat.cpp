#include "lfsys/models/thermostat.hpp"

#include <cmath>
#include <limits>

#include "lfsys/core/errors.hpp"
#include "lfsys/simd/kernels.hpp"

namespace lfsys {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Integrable:
      return "Integrable";
    case Regime::Attractor:
      return "AttractorRegime";
    case Regime::Boundary:
      return "Boundary";
    case Regime::Other:
      return "Other";
  }
  return "?";
}

Regime thermostat_regime(const OperatorL& l, double k, double rel_tol) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("thermostat: k must be positive");
  const double inv = 1.0 / k;
  const double r_min = l.r_min();
  const double r_max = l.r_max();
  if (std::abs(inv - r_max) <= rel_tol * std::max(1.0, std::abs(r_max))) return Regime::Boundary;
  if (inv > r_max) return Regime::Attractor;
  if (inv > r_min) return Regime::Integrable;
  return Regime::Other;
}

RegimeTable thermostat_regimes(const OperatorL& l) {
  RegimeTable t;
  t.r_min = l.r_min();
  t.r_max = l.r_max();
  const double inf = std::numeric_limits<double>::infinity();
  if (t.r_max > 0.0) {
    t.boundary = 1.0 / t.r_max;
    t.attractor = {0.0, 1.0 / t.r_max};
    if (t.r_min < t.r_max) t.integrable = std::make_pair(1.0 / t.r_max, t.r_min > 0.0 ? 1.0 / t.r_min : inf);
  } else {
    t.attractor = {0.0, inf};
  }
  t.attractor_note = "asymptotic to the suspension of the automorphism e^L";
  return t;
}

ThermostatRun thermostat_simulate(const ThermostatSpec& spec, const PhaseState& p0, double t,
                                  const Tolerances& tol) {
  const int n = spec.L.dim();
  if (!(spec.k > 0.0)) throw InvalidInput("thermostat: k must be positive");
  if (p0.dim() != n || p0.group.w.size() != n) throw InvalidInput("thermostat: dimension mismatch");
  ThermostatRun run;
  PhaseState start = p0;
  const double v2 = start.algebra.norm_squared();
  if (!(v2 > 0.0)) throw InvalidInput("thermostat: the start velocity must be non-zero");
  if (std::abs(v2 - spec.k) > 1e-12 * spec.k) {
    const double s = std::sqrt(spec.k / v2);
    start.algebra.xi *= s;
    start.algebra.eta *= s;
    run.rescaled = true;
  }

  const SystemSpec sys = SystemSpec::make(spec.L, spec.field());
  run.trajectory = flow_trajectory(start, sys, t, tol);

  std::vector<Vector> velocities;
  velocities.reserve(run.trajectory.size());
  for (const auto& y : run.trajectory.states()) velocities.push_back(y.tail(n + 1));
  run.energy_drift = simd::max_norm2_deviation(simd::PointBatch::from_points(velocities), spec.k);

  run.regime = thermostat_regime(spec.L, spec.k);
  const Vector end = (t >= 0.0 ? run.trajectory.back() : run.trajectory.front()).tail(n + 1) /
                     std::sqrt(spec.k);
  Vector target = Vector::Zero(n + 1);
  target[n] = 1.0;
  run.distance_to_suspension = (end - target).norm();
  run.converged_to_suspension = run.distance_to_suspension <= tol.attractor_distance;

  if (run.regime == Regime::Integrable) {
    const Vector zeta = start.algebra.xi / std::sqrt(spec.k);
    if (zeta.norm() < 1.0) run.escape = detect_escape(zeta, spec.field(), tol.horizon, tol);
  }
  return run;
}

Regime diagnose_regime(const ThermostatSpec& spec, int samples, std::uint64_t seed,
                       const Tolerances& tol) {
  if (samples < 1) throw InvalidInput("diagnose_regime: need at least one sample");
  Rng rng(seed);
  const FieldSpec f = spec.field();
  for (int i = 0; i < samples; ++i) {
    const Vector z = rng.in_ball(spec.L.dim(), 0.9);
    if (detect_escape(z, f, tol.horizon, tol).verdict == Verdict::Escaping) {
      return Regime::Integrable;
    }
  }
  return Regime::Attractor;
}

std::pair<double, double> bisect_threshold(const OperatorL& l, double k_lo, double k_hi,
                                           double width, int samples, std::uint64_t seed,
                                           const Tolerances& tol) {
  if (!(0.0 < k_lo && k_lo < k_hi)) throw InvalidInput("bisect_threshold: need 0 < k_lo < k_hi");
  if (diagnose_regime({l, k_lo}, samples, seed, tol) != Regime::Attractor ||
      diagnose_regime({l, k_hi}, samples, seed, tol) != Regime::Integrable) {
    throw InvalidInput("bisect_threshold: the bracket does not straddle the transition");
  }
  while (k_hi - k_lo > width) {
    const double mid = 0.5 * (k_lo + k_hi);
    if (diagnose_regime({l, mid}, samples, seed, tol) == Regime::Integrable) {
      k_hi = mid;
    } else {
      k_lo = mid;
    }
  }
  return {k_lo, k_hi};
}

WeylExponents weyl_exponents(const OperatorL& l, double k) {
  if (!l.is_diagonal()) throw Unsupported("weyl_exponents: L must be diagonal");
  if (!(k > 0.0)) throw InvalidInput("weyl_exponents: k must be positive");
  WeylExponents out;
  bool pos = false;
  bool neg = false;
  out.nonpositive_curvature = true;
  for (int i = 0; i < l.dim(); ++i) {
    const double tau = 1.0 - k * l.matrix()(i, i);
    out.tau.push_back(tau);
    pos = pos || tau > 0.0;
    neg = neg || tau < 0.0;
    if (!(tau >= 1.0 || tau == 0.0)) out.nonpositive_curvature = false;
  }
  out.integrable = pos && neg;
  return out;
}

}  // namespace lfsys
