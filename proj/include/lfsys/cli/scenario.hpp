#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfsys/cli/json_out.hpp"
#include "lfsys/cli/toml_lite.hpp"
#include "lfsys/core/tolerances.hpp"
#include "lfsys/flow/lf_flow.hpp"
#include "lfsys/models/metric.hpp"

namespace lfsys::cli {

extern const std::vector<std::string> kCommands;

/// Partially specified phase state. Missing w and u default to zero; a
/// missing (xi, eta) is drawn on the unit sphere from the scenario stream.
struct StateInput {
  std::optional<Vector> w;
  std::optional<double> u;
  std::optional<Vector> xi;
  std::optional<double> eta;
};

/// Seeds zeta0 for Euler orbits: listed, or `random` points drawn uniformly
/// in the ball of radius `radius` and kept when escaping.
struct SeedInput {
  std::vector<Vector> seeds;
  int random = 0;
  double radius = 0.9;
};

struct PortraitBlock {
  int resolution = 101;
  double s_max = 50.0;
};

struct PeriodicBlock {
  SeedInput seeds;
  double s_max = 50.0;
  bool write_samples = true;
};

struct SimulateBlock {
  StateInput state;
  double t = 10.0;
  int samples = 0;  // 0: one record per accepted step
  bool reversibility = true;
};

struct ToriBlock {
  SeedInput seeds;
  double s_max = 50.0;
  double a = 0.0;
};

struct LyapunovBlock {
  enum class Start { State, Suspension, Orbit };
  Start start = Start::Suspension;
  StateInput state;
  Vector orbit_seed;
  double s_max = 50.0;
  double t_start = 10.0;
  double t_end = 100.0;
  double renormalize_every = 1.0;
};

struct DensityBlock {
  int r_max = 4;
  int grid = 41;
  double min_abs = 0.1;
  std::vector<double> u{-1.0, 0.0, 1.0};
  bool smoothed = true;
};

struct ThermostatBlock {
  std::vector<double> k;
  double t = 100.0;
  std::optional<Vector> xi;
  std::optional<double> eta;
  bool orbits = true;  // build orbit and torus in the integrable regime
  std::optional<std::pair<double, double>> bisect;
  double width = 1e-3;
  int samples = 16;
};

struct GeodesicBlock {
  MetricSpec metric;
  GeodesicState state;
  double t = 100.0;
  int samples = 0;  // 0: no trajectory file
  bool compact_check = true;
};

struct SweepBlock {
  enum class Kind { ThermostatK, GeodesicMomenta };
  Kind kind = Kind::ThermostatK;
  double k_min = 0.1;
  double k_max = 4.0;
  int count = 50;
  double p_min = -2.0;
  double p_max = 2.0;
  double h = 2.0;
};

struct Scenario {
  std::string file;
  std::string command;
  std::uint64_t seed = 1;
  int threads = 1;
  int n = 0;
  Tolerances tol;
  std::optional<SystemSpec> system;
  /// The parsed scenario, for the manifest.
  Json echo;

  std::optional<PortraitBlock> portrait;
  std::optional<PeriodicBlock> periodic;
  std::optional<SimulateBlock> simulate;
  std::optional<ToriBlock> tori;
  std::optional<LyapunovBlock> lyapunov;
  std::optional<DensityBlock> density;
  std::optional<ThermostatBlock> thermostat;
  std::optional<GeodesicBlock> geodesic;
  std::optional<SweepBlock> sweep;
};

/// Strict parse: unknown sections and keys, wrong types and inconsistent
/// dimensions throw ScenarioError naming the field. Overrides ("key=value")
/// are applied after [tolerances] and before the system is validated. A
/// non-empty `command` replaces the scenario's own.
Scenario parse_scenario(const Document& doc, const std::vector<std::string>& tol_overrides = {},
                        const std::string& command = "");
Scenario parse_scenario_file(const std::string& path,
                             const std::vector<std::string>& tol_overrides = {},
                             const std::string& command = "");

/// Completes a partial state; the random parts come from rng.
PhaseState resolve_state(const StateInput& in, int n, Rng& rng);

}  // namespace lfsys::cli
