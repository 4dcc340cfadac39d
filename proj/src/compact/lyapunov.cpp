#include "lfsys/compact/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lfsys/core/errors.hpp"
#include "lfsys/euler/euler.hpp"

namespace lfsys {

namespace {

// Layout [xi (n), eta, u, Y (n*n, column-major)].
ode::Rhs frame_system(const SystemSpec& sys) {
  const int n = sys.dim();
  const Matrix l = sys.L.matrix();
  const FieldSpec f = sys.F;
  return [n, l, f](double, const ode::State& y, ode::State& dy) {
    dy.resize(n + 2 + n * n);
    const auto xi = y.head(n);
    const double eta = y[n];
    const Vector fx = f.eval_unchecked(xi);
    dy.head(n) = eta * fx;
    dy[n] = -fx.dot(xi);
    dy[n + 1] = eta;
    Eigen::Map<const Matrix> frame(y.data() + n + 2, n, n);
    Eigen::Map<Matrix> dframe(dy.data() + n + 2, n, n);
    dframe.noalias() = -eta * (l * frame);
  };
}

}  // namespace

LyapunovReport lyapunov_exponents(const PhaseState& p0, const SystemSpec& sys,
                                  const LyapunovOptions& window, const Tolerances& tol) {
  const int n = sys.dim();
  if (p0.dim() != n) throw InvalidInput("lyapunov_exponents: dimension mismatch");
  if (!(window.t_end > window.t_start) || window.t_start < 0.0) {
    throw InvalidInput("lyapunov_exponents: window must satisfy 0 <= t_start < t_end");
  }
  if (!(window.renormalize_every > 0.0)) {
    throw InvalidInput("lyapunov_exponents: renormalisation interval must be positive");
  }
  ode::Options opt = integration_options(tol);
  opt.record = false;

  ode::State y(n + 2 + n * n);
  y.head(n) = p0.algebra.xi;
  y[n] = p0.algebra.eta;
  y[n + 1] = p0.group.u;
  Eigen::Map<Matrix>(y.data() + n + 2, n, n).setIdentity();

  const ode::Rhs rhs = frame_system(sys);
  const double len = window.t_end - window.t_start;
  const double t_mid = window.t_start + 0.5 * len;
  double u_start = y[n + 1];
  double u_mid = u_start;
  Vector log_growth = Vector::Zero(n);

  // The frame also evolves (renormalised, not counted) before the window so
  // that its columns align with the growth directions.
  double t = 0.0;
  const double breaks[] = {window.t_start, t_mid, window.t_end};
  for (int stage = 0; stage < 3; ++stage) {
    const double stop = breaks[stage];
    const bool counting = stage > 0;
    while (t < stop) {
      const double t_next = std::min(stop, t + window.renormalize_every);
      y = ode::integrate(rhs, y, t, t_next, opt).back();
      t = t_next;
      Eigen::Map<Matrix> frame(y.data() + n + 2, n, n);
      Eigen::HouseholderQR<Matrix> qr(frame);
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      Matrix q = qr.householderQ();
      for (int i = 0; i < n; ++i) {
        const double d = r(i, i);
        if (d == 0.0 || !std::isfinite(d)) {
          throw IntegrationFailure("lyapunov_exponents: degenerate frame", t, y);
        }
        if (counting) log_growth[i] += std::log(std::abs(d));
        if (d < 0.0) q.col(i) = -q.col(i);
      }
      frame = q;
    }
    if (stage == 0) u_start = y[n + 1];
    if (stage == 1) u_mid = y[n + 1];
  }
  const double u_end = y[n + 1];

  LyapunovReport rep;
  rep.t_start = window.t_start;
  rep.t_end = window.t_end;
  rep.eta_average = (u_end - u_start) / len;
  rep.eta_first_half = (u_mid - u_start) / (0.5 * len);
  rep.eta_second_half = (u_end - u_mid) / (0.5 * len);
  rep.converged = std::abs(rep.eta_first_half - rep.eta_second_half) /
                      std::max(1.0, std::abs(rep.eta_average)) <
                  tol.eta_convergence;

  for (const auto& l : sys.L.eigenvalues()) rep.exponents_formula.push_back(-l.real() * rep.eta_average);
  for (int i = 0; i < n; ++i) rep.exponents_tangent.push_back(log_growth[i] / len);
  std::sort(rep.exponents_formula.rbegin(), rep.exponents_formula.rend());
  std::sort(rep.exponents_tangent.rbegin(), rep.exponents_tangent.rend());
  for (int i = 0; i < n; ++i) {
    rep.max_discrepancy =
        std::max(rep.max_discrepancy, std::abs(rep.exponents_formula[static_cast<std::size_t>(i)] -
                                               rep.exponents_tangent[static_cast<std::size_t>(i)]));
  }
  return rep;
}

}  // namespace lfsys
