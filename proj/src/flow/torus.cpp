#include "lfsys/flow/torus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "lfsys/core/errors.hpp"

namespace lfsys {

namespace {
using Gauss = boost::math::quadrature::gauss<double, 16>;
constexpr int kNodesPerPiece = 16;
constexpr std::size_t kMinNodes = 512;
}  // namespace

Vector torus_translation(const PeriodicOrbit& orbit, double a, const OperatorL& l, int pieces) {
  const int n = orbit.dim();
  const double u_ref = orbit.samples.front()[n + 1];
  const auto& x = Gauss::abscissa();
  const auto& wts = Gauss::weights();
  Vector c = Vector::Zero(n);
  for (const auto& seg : orbit.samples.segments()) {
    const double lo = seg.t_lo();
    const double width = (seg.t_hi() - lo) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double mid = lo + (k + 0.5) * width;
      const double half = 0.5 * width;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (const double sign : {-1.0, 1.0}) {
          const Vector y = seg.eval(mid + sign * half * x[i]);
          c += (half * wts[i]) * (l.exp_scaled(a + y[n + 1] - u_ref) * y.head(n));
        }
      }
    }
  }
  return c;
}

InvariantTorus build_invariant_torus(const PeriodicOrbit& orbit, double a, const SystemSpec& sys,
                                     const Tolerances& tol, std::uint64_t seed) {
  const int n = sys.dim();
  if (orbit.dim() != n) throw InvalidInput("build_invariant_torus: orbit dimension mismatch");
  if (orbit.samples.segments().empty()) {
    throw InvalidInput("build_invariant_torus: orbit has no dense output");
  }

  InvariantTorus torus;
  torus.a = a;
  torus.period = orbit.period;
  torus.base = orbit.start();

  const std::size_t segs = orbit.samples.segments().size();
  const int pieces = static_cast<int>(
      std::max<std::size_t>(1, (kMinNodes + segs * kNodesPerPiece - 1) / (segs * kNodesPerPiece)));
  const Vector coarse = torus_translation(orbit, a, sys.L, pieces);
  const Vector fine = torus_translation(orbit, a, sys.L, 2 * pieces);
  torus.translation = fine;
  torus.quadrature_error = (fine - coarse).norm();
  torus.quadrature_nodes = segs * static_cast<std::size_t>(2 * pieces * kNodesPerPiece);

  Vector coords = sys.lattice.to_coords(fine);
  for (int i = 0; i < n; ++i) coords[i] = wrap_unit(coords[i]);
  torus.translation_coords = coords;

  const double u_ref = orbit.samples.front()[n + 1];
  torus.u_min = 0.0;
  torus.u_max = 0.0;
  for (const auto& y : orbit.samples.states()) {
    torus.u_min = std::min(torus.u_min, y[n + 1] - u_ref);
    torus.u_max = std::max(torus.u_max, y[n + 1] - u_ref);
  }

  Rng rng(seed);
  std::vector<Vector> shifts;
  for (int k = 0; k < 3; ++k) {
    Vector c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform();
    const Vector w = sys.lattice.from_coords(c);
    torus.base_points.push_back(w);
    const PhaseState p = PhaseState::make(w, a, torus.base.xi, torus.base.eta);
    const PhaseState q = flow(p, sys, orbit.period, tol);
    const PhaseState expect =
        PhaseState::make(w + torus.translation, a, torus.base.xi, torus.base.eta);
    const double d = std::sqrt((q.group.w - expect.group.w).squaredNorm() +
                               std::pow(q.group.u - expect.group.u, 2) +
                               (q.algebra.xi - expect.algebra.xi).squaredNorm() +
                               std::pow(q.algebra.eta - expect.algebra.eta, 2));
    torus.verify_defect = std::max(torus.verify_defect, d);
    shifts.push_back(q.group.w - w);
  }
  for (std::size_t i = 0; i < shifts.size(); ++i)
    for (std::size_t j = i + 1; j < shifts.size(); ++j)
      torus.translation_spread = std::max(torus.translation_spread, (shifts[i] - shifts[j]).norm());

  if (!(torus.verify_defect <= tol.torus_verify)) {
    throw VerificationFailure("build_invariant_torus: leaf-return defect " +
                              std::to_string(torus.verify_defect) + " exceeds " +
                              std::to_string(tol.torus_verify));
  }
  return torus;
}

namespace {

constexpr int kMaxCoefficient = 64;

int gcd_all(const std::vector<int>& k) {
  int g = 0;
  for (int v : k) g = std::gcd(g, std::abs(v));
  return g;
}

}  // namespace

RotationVector rotation_vector(const InvariantTorus& torus, double tol) {
  const auto n = static_cast<int>(torus.translation_coords.size());
  RotationVector rv;
  rv.frequencies.resize(n + 1);
  for (int i = 0; i < n; ++i) rv.frequencies[i] = torus.translation_coords[i] / torus.period;
  rv.frequencies[n] = 1.0 / torus.period;

  // Relations k . x = m with x the reduced lattice coordinates. Exhaustive for
  // n <= 3, pairwise beyond that.
  const Vector& x = torus.translation_coords;
  std::vector<std::vector<int>> found;
  auto consider = [&](const std::vector<int>& k) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += k[static_cast<std::size_t>(i)] * x[i];
    const double m = std::round(dot);
    if (std::abs(dot - m) > tol) return;
    std::vector<int> rel = k;
    rel.push_back(-static_cast<int>(m));
    if (gcd_all(rel) != 1) return;
    // Canonical sign: first nonzero entry positive.
    for (int v : rel) {
      if (v == 0) continue;
      if (v < 0) return;
      break;
    }
    found.push_back(rel);
  };

  if (n <= 3) {
    std::vector<int> k(static_cast<std::size_t>(n), -kMaxCoefficient);
    for (;;) {
      if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) consider(k);
      std::size_t i = 0;
      while (i < k.size() && k[i] == kMaxCoefficient) k[i++] = -kMaxCoefficient;
      if (i == k.size()) break;
      ++k[i];
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int a = -kMaxCoefficient; a <= kMaxCoefficient; ++a)
          for (int b = -kMaxCoefficient; b <= kMaxCoefficient; ++b) {
            if (i == j && b != 0) continue;
            if (a == 0 && b == 0) continue;
            std::vector<int> k(static_cast<std::size_t>(n), 0);
            k[static_cast<std::size_t>(i)] += a;
            k[static_cast<std::size_t>(j)] += b;
            consider(k);
          }
  }
  auto l1 = [](const std::vector<int>& k) {
    int s = 0;
    for (int v : k) s += std::abs(v);
    return s;
  };
  std::stable_sort(found.begin(), found.end(),
                   [&](const auto& p, const auto& q) { return l1(p) < l1(q); });
  found.erase(std::unique(found.begin(), found.end()), found.end());
  if (found.size() > 16) found.resize(16);
  rv.resonances = std::move(found);
  return rv;
}

}  // namespace lfsys
