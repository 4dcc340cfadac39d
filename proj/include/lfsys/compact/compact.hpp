#pragma once

#include "lfsys/core/operator.hpp"
#include "lfsys/core/types.hpp"

namespace lfsys {

struct SystemSpec;

struct AutomorphismCheck {
  bool ok = false;
  /// e^L in lattice coordinates, rounded (meaningful when ok).
  IntMatrix a;
  /// max distance of an entry of e^L (lattice coordinates) to the nearest integer
  double defect = 0.0;
  double det = 0.0;
};

/// Whether e^L maps the lattice onto itself.
AutomorphismCheck check_automorphism(const OperatorL& l, const Lattice& lattice,
                                     double rounding = 1e-8);

/// Representative of Gamma (w,u) with u in [0,1) and w in the fundamental
/// parallelepiped, Gamma generated by Gamma_0 and (0, 1).
PhaseState reduce_mod(const PhaseState& p, const SystemSpec& sys);

}  // namespace lfsys
