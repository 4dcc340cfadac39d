#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfsys/euler/euler.hpp"
#include "lfsys/flow/lf_flow.hpp"

namespace lfsys {

/// Isokinetic thermostat with E = d/du, |E| = 1, at kinetic energy k.
struct ThermostatSpec {
  OperatorL L;
  double k = 1.0;

  FieldSpec field() const { return FieldSpec::thermostat(L, k); }
};

enum class Regime { Integrable, Attractor, Boundary, Other };
const char* regime_name(Regime r);

/// Regime of k from 1/k against the real parts of spec(L): integrable for
/// r_min < 1/k < r_max, attractor for 1/k > r_max, boundary at 1/k = r_max.
/// Anything else (1/k <= r_min) is reported as Other.
Regime thermostat_regime(const OperatorL& l, double k, double rel_tol = 1e-12);

struct RegimeTable {
  double r_min = 0.0;
  double r_max = 0.0;
  /// k-interval of the integrable regime (hi may be +inf); empty if none.
  std::optional<std::pair<double, double>> integrable;
  /// k-interval of the attractor regime.
  std::pair<double, double> attractor{0.0, 0.0};
  /// k = 1 / r_max when r_max > 0.
  std::optional<double> boundary;
  std::string attractor_note;
};

RegimeTable thermostat_regimes(const OperatorL& l);

struct ThermostatRun {
  ode::Trajectory trajectory;  // packed [w, u, xi, eta]
  bool rescaled = false;       // start rescaled to |v|^2 = k
  double energy_drift = 0.0;   // max | |v|^2 - k |
  Regime regime = Regime::Other;
  /// |(xi, eta)/sqrt(k) - (0, 1)| at the end time.
  double distance_to_suspension = 0.0;
  bool converged_to_suspension = false;
  /// Escape analysis of the normalised start (integrable regime).
  std::optional<EscapeResult> escape;
};

ThermostatRun thermostat_simulate(const ThermostatSpec& spec, const PhaseState& p0, double t,
                                  const Tolerances& tol = {});

/// Regime read off the dynamics: Integrable when some of `samples` seeded
/// points of the unit ball are escaping for F_k, Attractor otherwise.
Regime diagnose_regime(const ThermostatSpec& spec, int samples, std::uint64_t seed,
                       const Tolerances& tol = {});

/// Bisection on diagnose_regime between k_lo (attractor) and k_hi
/// (integrable) until the bracket is narrower than width.
std::pair<double, double> bisect_threshold(const OperatorL& l, double k_lo, double k_hi,
                                           double width, int samples, std::uint64_t seed,
                                           const Tolerances& tol = {});

struct WeylExponents {
  std::vector<double> tau;
  bool integrable = false;
  bool nonpositive_curvature = false;
};

/// tau_i = 1 - k lambda_i for diagonal L.
WeylExponents weyl_exponents(const OperatorL& l, double k);

}  // namespace lfsys
