#include "lfsys/compact/compact.hpp"

#include <cmath>

#include "lfsys/core/errors.hpp"
#include "lfsys/flow/lf_flow.hpp"

namespace lfsys {

AutomorphismCheck check_automorphism(const OperatorL& l, const Lattice& lattice,
                                     double rounding) {
  AutomorphismCheck out;
  const int n = l.dim();
  const Matrix& b = lattice.basis();
  const Matrix m = b.partialPivLu().solve(l.exp_scaled(1.0) * b);
  out.a = IntMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = std::round(m(i, j));
      out.defect = std::max(out.defect, std::abs(m(i, j) - r));
      out.a(i, j) = static_cast<long long>(r);
    }
  out.det = out.a.cast<double>().determinant();
  out.ok = out.defect <= rounding && std::abs(std::abs(out.det) - 1.0) < 0.5;
  return out;
}

namespace {

// One application of A^{-1} (or A) to lattice coordinates, reduced mod 1.
Vector act(const Matrix& m, const Vector& x) {
  Vector y = m * x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = wrap_unit(y[i]);
  return y;
}

}  // namespace

PhaseState reduce_mod(const PhaseState& p, const SystemSpec& sys) {
  if (!sys.compactified) throw Unsupported("reduce_mod: system is not compactified");
  const double k = std::floor(p.group.u);
  if (!std::isfinite(k)) throw InvalidInput("reduce_mod: non-finite u");
  // Left multiplication by (gamma, -k): w -> gamma + e^{-kL} w, u -> u - k.
  const Matrix a = sys.automorphism.cast<double>();
  const Matrix a_inv = a.inverse().array().round().matrix();
  Vector x = sys.lattice.fractional_coords(p.group.w);
  const long long steps = static_cast<long long>(std::abs(k));
  const Matrix& step = k > 0 ? a_inv : a;
  for (long long s = 0; s < steps; ++s) x = act(step, x);
  PhaseState out = p;
  out.group.w = sys.lattice.from_coords(x);
  out.group.u = p.group.u - k;
  return out;
}

}  // namespace lfsys
