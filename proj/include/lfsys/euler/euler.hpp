#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfsys/core/field.hpp"
#include "lfsys/core/tolerances.hpp"
#include "lfsys/core/types.hpp"
#include "lfsys/ode/integrator.hpp"

namespace lfsys {

/// (eta F(xi), -<F(xi), xi>)
AlgebraPoint euler_rhs(const AlgebraPoint& v, const FieldSpec& f, double slack = 1e-9);

/// The Euler system on the flat layout [xi, eta]. Trial stages skip the ball
/// check so that an adaptive step may probe just outside the sphere.
ode::Rhs euler_system(const FieldSpec& f);

/// The Euler system extended by du/dt = eta, on the layout [xi, eta, u].
ode::Rhs euler_u_system(const FieldSpec& f);

/// The detection flow dzeta/ds = F(zeta).
ode::Rhs field_system(const FieldSpec& f);

ode::Options integration_options(const Tolerances& tol);

enum class Verdict { Escaping, Bounded, Undetermined };
const char* verdict_name(Verdict v);

struct EscapeResult {
  Verdict verdict = Verdict::Undetermined;
  double s_minus = 0.0;
  double s_plus = 0.0;
  Vector exit_minus;
  Vector exit_plus;
  double transversality_minus = 0.0;
  double transversality_plus = 0.0;
  bool forward_exit = false;
  bool backward_exit = false;
  /// Tangential contacts skipped before the reported exits.
  int grazes = 0;
  /// Set when a conserved quadratic decided the verdict.
  bool certified = false;
  std::string diagnostic;
};

/// Symmetric positive-definite P with F^T P + P F = 0, if one exists, so that
/// zeta^T P zeta is constant along dzeta/ds = F zeta.
std::optional<Matrix> conserved_quadratic(const Matrix& f, double tol = 1e-10);

/// Integrates dzeta/ds = F(zeta) both ways from zeta0 to the unit sphere.
EscapeResult detect_escape(const Vector& zeta0, const FieldSpec& f, double s_max,
                           const Tolerances& tol = {});

/// Same, with a precomputed conserved quadratic for linear fields (skips the
/// nullspace solve when called per grid cell).
EscapeResult detect_escape(const Vector& zeta0, const FieldSpec& f, double s_max,
                           const Tolerances& tol, const std::optional<Matrix>& certificate);

/// One full period of the reversible orbit through an escaping pair. The
/// stored trajectory uses the layout [xi, eta, u] over [0, T].
struct PeriodicOrbit {
  double t0 = 0.0;
  double period = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
  ode::Trajectory samples;
  double closure_defect = 0.0;
  /// max over sample times of |eta(T-t) + eta(t)| and |xi(T-t) - xi(t)|
  double symmetry_defect = 0.0;
  /// |xi(t0) - exit_plus|
  double arrival_defect = 0.0;

  int dim() const;
  AlgebraPoint state_at(double t) const;
  double u_at(double t) const;
  AlgebraPoint start() const { return state_at(0.0); }
  /// (t, u(t)) at the accepted step times.
  std::vector<std::pair<double, double>> u_profile() const;
};

PeriodicOrbit build_periodic_orbit(const EscapeResult& esc, const FieldSpec& f,
                                   const Tolerances& tol = {});

enum class SpectrumTag { MixedRealParts, ImaginaryNonSkew, Skew, PureImaginaryResonant, Other };
const char* spectrum_tag_name(SpectrumTag t);

struct SpectrumClass {
  SpectrumTag tag = SpectrumTag::Other;
  std::vector<Complex> eigenvalues;
  /// Integer relation among the positive frequencies (PureImaginaryResonant).
  std::vector<int> resonance;
};

/// Precedence: mixed real parts, exact skew, resonant imaginary (repeated
/// eigenvalues or an integer relation with max |k_i| <= 8 among the positive
/// frequencies), distinct imaginary, other.
SpectrumClass classify_linear_field(const Matrix& f, double zero_tol = 1e-9);

struct EscapeCell {
  Vector center;
  bool inside = false;
  EscapeResult result;
};

struct EscapeMap {
  int resolution = 0;
  std::vector<EscapeCell> cells;  // index = sum_d i_d * resolution^d
  std::size_t inside = 0;
  std::size_t escaping = 0;
  std::size_t bounded = 0;
  std::size_t undetermined = 0;
  double escaping_fraction() const;
  double bounded_fraction() const;
  double undetermined_fraction() const;
};

/// Runs detect_escape at the centres -1 + (2i+1)/N of an N^n grid; cells
/// outside the open unit ball are skipped. Fractions are over inside cells.
EscapeMap sample_escaping_set(const FieldSpec& f, int resolution, double s_max,
                              const Tolerances& tol = {}, int threads = 1);

}  // namespace lfsys
