#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lfsys/core/tolerances.hpp"
#include "lfsys/ode/integrator.hpp"

namespace lfsys {

/// Behaviour of alpha at an end of the interval.
enum class EndLimit { Zero, Positive, Infinite };
const char* end_limit_name(EndLimit e);

/// alpha(x0) = x0^tau
struct PowerLaw {
  double tau = 0.0;
};

/// Monotone cubic (PCHIP) through the samples; limits at the ends are given,
/// not inferred.
class Tabulated {
 public:
  Tabulated(std::vector<double> x, std::vector<double> y, EndLimit at_a, EndLimit at_b);

  double value(double x0) const;
  double derivative(double x0) const;
  EndLimit at_a() const { return at_a_; }
  EndLimit at_b() const { return at_b_; }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  struct Impl;
  std::vector<double> x_;
  EndLimit at_a_;
  EndLimit at_b_;
  std::shared_ptr<const Impl> impl_;
};

using AlphaProfile = std::variant<PowerLaw, Tabulated>;

/// ds^2 = sum alpha_j(x0)^2 dx_j^2 + dx0^2 on (a, b) x T^n.
struct MetricSpec {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  std::vector<AlphaProfile> alphas;

  int dim() const { return static_cast<int>(alphas.size()); }
  double alpha(int j, double x0) const;
  double alpha_prime(int j, double x0) const;
  EndLimit limit_at_a(int j) const;
  EndLimit limit_at_b(int j) const;
  /// Throws InvalidInput on a malformed interval or profile.
  void validate() const;
};

struct GeodesicState {
  Vector x;
  double x0 = 0.0;
  Vector p;
  double p0 = 0.0;
};

/// Flat layout [x (n), x0, p (n), p0].
Vector pack(const GeodesicState& s);
GeodesicState unpack_geodesic(const Vector& y, int n);

double hamiltonian(const GeodesicState& s, const MetricSpec& m);
GeodesicState geodesic_rhs(const GeodesicState& s, const MetricSpec& m);
ode::Rhs geodesic_system(const MetricSpec& m);

struct GeodesicRun {
  ode::Trajectory trajectory;
  double h_drift = 0.0;
  double p_drift = 0.0;
  double x0_min = 0.0;
  double x0_max = 0.0;
  /// Set when x0 reached a finite end of the interval.
  std::optional<double> exit_time;
  std::string exit_side;  // "a" or "b"
};

GeodesicRun geodesic_simulate(const GeodesicState& s0, const MetricSpec& m, double t,
                              const ode::Tolerance& tol, bool record = false);

struct CompactLevel {
  bool compact = false;
  bool empty = false;  // compact verdict with no admissible x0
  std::string side;    // for non-compact: "a", "b" or "both"
  double lo = 0.0;
  double hi = 0.0;
  /// Confining pairs (i at a, l at b) used for the interval.
  std::vector<std::pair<int, int>> pairs;
};

/// Compact iff some p_i != 0 with alpha_i -> 0 at a and some p_l != 0 with
/// alpha_l -> 0 at b. The interval is the intersection over such pairs of
/// {alpha_i^-2 p_i^2 + alpha_l^-2 p_l^2 <= 2H}.
CompactLevel check_compact_level(const MetricSpec& m, const Vector& p, double h_value);

}  // namespace lfsys
