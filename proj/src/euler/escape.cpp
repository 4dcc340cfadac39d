#include <algorithm>
#include <cmath>

#include "lfsys/core/errors.hpp"
#include "lfsys/core/parallel.hpp"
#include "lfsys/euler/euler.hpp"
#include "lfsys/simd/kernels.hpp"

namespace lfsys {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Escaping:
      return "Escaping";
    case Verdict::Bounded:
      return "Bounded";
    case Verdict::Undetermined:
      return "Undetermined";
  }
  return "?";
}

std::optional<Matrix> conserved_quadratic(const Matrix& f, double tol) {
  const int n = static_cast<int>(f.rows());
  // Basis of symmetric matrices: E_ii and E_ij + E_ji.
  std::vector<Matrix> basis;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      basis.push_back(e);
    }
  const auto m = static_cast<Eigen::Index>(basis.size());
  Matrix op(n * n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Matrix& e = basis[static_cast<std::size_t>(k)];
    Matrix img = f.transpose() * e + e * f;
    op.col(k) = Eigen::Map<const Vector>(img.data(), n * n);
  }
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  std::vector<Matrix> null;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double s = k < sv.size() ? sv[k] : 0.0;
    if (s > tol * scale) continue;
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index c = 0; c < m; ++c) p += svd.matrixV()(c, k) * basis[static_cast<std::size_t>(c)];
    null.push_back(p);
  }
  if (null.empty()) return std::nullopt;

  auto score = [](const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    const auto& ev = es.eigenvalues();
    return ev.minCoeff() / std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  };
  auto project = [&](const Matrix& target) {
    Matrix p = Matrix::Zero(n, n);
    for (const auto& q : null) p += (q.cwiseProduct(target).sum() / q.squaredNorm()) * q;
    return p;
  };

  std::vector<Matrix> candidates;
  candidates.push_back(project(Matrix::Identity(n, n)));
  for (const auto& q : null) {
    candidates.push_back(q);
    candidates.push_back(-q);
  }
  Rng rng(0x5eed);
  for (int trial = 0; trial < 32; ++trial) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    candidates.push_back(project(a * a.transpose() + 0.1 * Matrix::Identity(n, n)));
  }
  double best = 0.0;
  std::optional<Matrix> out;
  for (const auto& c : candidates) {
    if (c.norm() == 0.0) continue;
    const double s = score(c);
    if (s > best + 1e-12) {
      best = s;
      out = c / c.norm();
    }
  }
  if (!out || best < 1e-8) return std::nullopt;
  // Orthogonal null vectors from the SVD need not be exact; re-symmetrise.
  Matrix p = 0.5 * (*out + out->transpose());
  return p;
}

namespace {

struct ExitSearch {
  bool found = false;
  double s = 0.0;
  Vector exit;
  double transversality = 0.0;
  double max_norm2 = 0.0;
  int grazes = 0;
};

ExitSearch find_exit(const Vector& zeta0, const FieldSpec& f, double s_end,
                     const Tolerances& tol) {
  ExitSearch out;
  const ode::Rhs rhs = field_system(f);
  ode::Options opt = integration_options(tol);
  opt.record = false;
  ode::EventSpec sphere{[](const ode::State& z) { return z.squaredNorm() - 1.0; },
                        ode::Direction::Rising, tol.event};
  out.max_norm2 = zeta0.squaredNorm();
  auto observer = [&out](const ode::DenseSegment& seg) {
    out.max_norm2 = std::max(out.max_norm2, seg.end().squaredNorm());
    out.max_norm2 = std::max(out.max_norm2, seg.eval(0.5 * (seg.t_begin + seg.t_end)).squaredNorm());
  };
  const double dir = s_end >= 0.0 ? 1.0 : -1.0;
  double s = 0.0;
  Vector z = zeta0;
  // A tangential contact is not an exit; continue past it to the first
  // transversal crossing.
  for (int attempt = 0; attempt < 16; ++attempt) {
    auto r = ode::integrate_to_event(rhs, z, s, s_end, {sphere}, opt, observer);
    if (!r.hit) return out;
    const Vector& e = r.hit->y;
    const double tr = f.eval_unchecked(e).dot(e);
    if (dir * tr > tol.transversality_margin) {
      out.found = true;
      out.s = r.hit->t;
      out.exit = e;
      out.transversality = tr;
      return out;
    }
    ++out.grazes;
    // Leave the contact point behind by a relative nudge of the event time.
    const double resume = r.hit->t + dir * std::max(1e-9, 1e-9 * std::abs(r.hit->t));
    if (dir * (s_end - resume) <= 0.0) return out;
    auto step = ode::integrate(rhs, e, r.hit->t, resume, opt);
    s = resume;
    z = step.back();
    if (z.squaredNorm() > 1.0 + 1e-6) {
      // It left the ball after all: treat the contact as the exit.
      out.found = true;
      out.s = r.hit->t;
      out.exit = e;
      out.transversality = tr;
      return out;
    }
  }
  return out;
}

}  // namespace

EscapeResult detect_escape(const Vector& zeta0, const FieldSpec& f, double s_max,
                           const Tolerances& tol) {
  std::optional<Matrix> cert;
  if (auto m = f.linear_matrix()) cert = conserved_quadratic(*m);
  return detect_escape(zeta0, f, s_max, tol, cert);
}

EscapeResult detect_escape(const Vector& zeta0, const FieldSpec& f, double s_max,
                           const Tolerances& tol, const std::optional<Matrix>& certificate) {
  if (zeta0.size() != f.dim()) throw InvalidInput("detect_escape: dimension mismatch");
  if (!zeta0.allFinite()) throw InvalidInput("detect_escape: non-finite start");
  if (!(zeta0.norm() < 1.0)) throw InvalidInput("detect_escape: start must lie in the open unit ball");
  if (!(s_max > 0.0)) throw InvalidInput("detect_escape: s_max must be positive");

  EscapeResult res;
  const double inner = (1.0 - tol.bounded_margin) * (1.0 - tol.bounded_margin);
  if (certificate && f.is_linear()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(*certificate);
    const double lmin = es.eigenvalues().minCoeff();
    const double q = zeta0.dot(*certificate * zeta0);
    if (lmin > 0.0 && q / lmin < inner) {
      res.verdict = Verdict::Bounded;
      res.certified = true;
      res.diagnostic = "conserved quadratic keeps the orbit inside the margin";
      return res;
    }
  }

  ExitSearch fwd;
  ExitSearch bwd;
  try {
    fwd = find_exit(zeta0, f, s_max, tol);
    bwd = find_exit(zeta0, f, -s_max, tol);
  } catch (const IntegrationFailure& e) {
    res.verdict = Verdict::Undetermined;
    res.diagnostic = std::string("integration failure: ") + e.what();
    return res;
  }
  res.forward_exit = fwd.found;
  res.backward_exit = bwd.found;
  res.grazes = fwd.grazes + bwd.grazes;
  if (fwd.found) {
    res.s_plus = fwd.s;
    res.exit_plus = fwd.exit;
    res.transversality_plus = fwd.transversality;
  }
  if (bwd.found) {
    res.s_minus = bwd.s;
    res.exit_minus = bwd.exit;
    res.transversality_minus = bwd.transversality;
  }
  if (fwd.found && bwd.found) {
    res.verdict = Verdict::Escaping;
    return res;
  }
  if (!fwd.found && !bwd.found && fwd.grazes == 0 && bwd.grazes == 0 &&
      std::max(fwd.max_norm2, bwd.max_norm2) <= inner) {
    res.verdict = Verdict::Bounded;
    res.diagnostic = "orbit stayed inside the margin for the whole horizon";
    return res;
  }
  res.verdict = Verdict::Undetermined;
  if (!fwd.found && !bwd.found) {
    res.diagnostic = "no exit within the horizon in either direction";
  } else {
    res.diagnostic = fwd.found ? "no backward exit within the horizon"
                               : "no forward exit within the horizon";
  }
  return res;
}

double EscapeMap::escaping_fraction() const {
  return inside ? static_cast<double>(escaping) / static_cast<double>(inside) : 0.0;
}
double EscapeMap::bounded_fraction() const {
  return inside ? static_cast<double>(bounded) / static_cast<double>(inside) : 0.0;
}
double EscapeMap::undetermined_fraction() const {
  return inside ? static_cast<double>(undetermined) / static_cast<double>(inside) : 0.0;
}

EscapeMap sample_escaping_set(const FieldSpec& f, int resolution, double s_max,
                              const Tolerances& tol, int threads) {
  if (resolution < 1) throw InvalidInput("sample_escaping_set: resolution must be >= 1");
  const int n = f.dim();
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    total *= static_cast<std::size_t>(resolution);
    if (total > 50'000'000) throw InvalidInput("sample_escaping_set: grid too large");
  }

  EscapeMap map;
  map.resolution = resolution;
  map.cells.resize(total);
  std::vector<Vector> centers(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vector c(n);
    std::size_t rem = idx;
    for (int d = 0; d < n; ++d) {
      const auto i = rem % static_cast<std::size_t>(resolution);
      rem /= static_cast<std::size_t>(resolution);
      c[d] = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / resolution;
    }
    centers[idx] = c;
  }

  // Certificate pre-pass over all cells with the batch kernels.
  std::optional<Matrix> cert;
  if (auto m = f.linear_matrix()) cert = conserved_quadratic(*m);
  const simd::PointBatch batch = simd::PointBatch::from_points(centers);
  std::vector<double> norm2(total);
  simd::quadratic_form(Matrix::Identity(n, n), batch, norm2);
  std::vector<double> q(total, 0.0);
  double lmin = 0.0;
  if (cert) {
    simd::quadratic_form(*cert, batch, q);
    Eigen::SelfAdjointEigenSolver<Matrix> es(*cert);
    lmin = es.eigenvalues().minCoeff();
  }
  const double inner = (1.0 - tol.bounded_margin) * (1.0 - tol.bounded_margin);

  parallel_for(total, threads, [&](std::size_t idx) {
    EscapeCell& cell = map.cells[idx];
    cell.center = centers[idx];
    cell.inside = norm2[idx] < 1.0;
    if (!cell.inside) return;
    if (cert && lmin > 0.0 && q[idx] / lmin < inner) {
      cell.result.verdict = Verdict::Bounded;
      cell.result.certified = true;
      cell.result.diagnostic = "conserved quadratic keeps the orbit inside the margin";
      return;
    }
    cell.result = detect_escape(cell.center, f, s_max, tol, cert);
  });

  for (const auto& cell : map.cells) {
    if (!cell.inside) continue;
    ++map.inside;
    switch (cell.result.verdict) {
      case Verdict::Escaping:
        ++map.escaping;
        break;
      case Verdict::Bounded:
        ++map.bounded;
        break;
      case Verdict::Undetermined:
        ++map.undetermined;
        break;
    }
  }
  return map;
}

}  // namespace lfsys
