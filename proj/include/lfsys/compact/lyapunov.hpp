#pragma once

#include <vector>

#include "lfsys/flow/lf_flow.hpp"

namespace lfsys {

struct LyapunovOptions {
  double t_start = 0.0;  // averaging window [t_start, t_end]
  double t_end = 100.0;
  double renormalize_every = 1.0;
};

struct LyapunovReport {
  double t_start = 0.0;
  double t_end = 0.0;
  double eta_average = 0.0;
  double eta_first_half = 0.0;
  double eta_second_half = 0.0;
  /// |first - second| / max(1, |eta_average|) < tol.eta_convergence
  bool converged = false;
  std::vector<double> exponents_formula;  // descending
  std::vector<double> exponents_tangent;  // descending
  double max_discrepancy = 0.0;           // componentwise |formula - tangent|
};

/// Leafwise exponents along the orbit of p0: the formula -Re lambda_i(L) eta_bar
/// and, independently, the growth of the left-invariant frame e^{-uL} obtained
/// by integrating dY/dt = -eta L Y with QR renormalisation.
LyapunovReport lyapunov_exponents(const PhaseState& p0, const SystemSpec& sys,
                                  const LyapunovOptions& window, const Tolerances& tol = {});

}  // namespace lfsys
