#pragma once

#include <map>
#include <string>

namespace lfsys {

/// Every numeric threshold that can influence a result. Defaults are the
/// library-wide values; the CLI echoes the full set into each run manifest.
struct Tolerances {
  double algebraic = 1e-10;          // identity checks on exact algebra
  double ode_check = 1e-6;           // checks that depend on an integration
  double ode_abs = 1e-12;            // integrator absolute tolerance
  double ode_rel = 1e-12;            // integrator relative tolerance
  double event = 1e-12;              // event refinement, in function value
  double field_slack = 1e-9;         // ball-domain slack for field_eval
  double transversality_margin = 1e-9;
  double bounded_margin = 1e-3;      // delta for {|zeta| <= 1 - delta}
  double horizon = 1e4;              // max integration horizon
  double eigen_zero = 1e-9;          // |Re lambda| below this counts as zero
  double automorphism_rounding = 1e-8;
  double torus_verify = 1e-4;
  double orbit_arrival = 1e-5;
  double attractor_distance = 1e-3;
  double attractor_time = 200.0;
  double resonance_rel = 1e-9;
  double rotation_resonance = 1e-8;
  double eta_convergence = 1e-3;

  /// Sets a field by its manifest key; returns false for unknown keys.
  bool set(const std::string& key, double value);
  std::map<std::string, double> as_map() const;
};

}  // namespace lfsys
