#include "lfsys/compact/density.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lfsys/core/errors.hpp"
#include "lfsys/simd/kernels.hpp"

namespace lfsys {

double invariant_density(const FieldSpec& f, double u) {
  const DivergenceInfo div = f.divergence(Vector::Zero(f.dim()));
  if (!div.constant) {
    throw Unsupported("invariant_density: requires constant div F, which fails for this field");
  }
  return std::exp(-u * div.value);
}

std::vector<Resonance> resonance_search(const std::vector<double>& lambda, int r_max,
                                        double rel_tol) {
  if (lambda.empty()) throw InvalidInput("resonance_search: empty eigenvalue list");
  if (r_max < 1) throw InvalidInput("resonance_search: R_max must be >= 1");
  for (double l : lambda)
    if (!std::isfinite(l)) throw InvalidInput("resonance_search: non-finite eigenvalue");
  const std::size_t n = lambda.size();
  std::vector<Resonance> out;
  std::vector<int> r(n, 0);
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t i, double sum,
                                                              double scale) {
    if (i == n) {
      if (std::abs(sum) <= rel_tol * scale) {
        Resonance res;
        res.r = r;
        res.even = std::all_of(r.begin(), r.end(), [](int v) { return v % 2 == 0; });
        out.push_back(std::move(res));
      }
      return;
    }
    for (int v = 0; v <= r_max; ++v) {
      r[i] = v;
      rec(i + 1, sum + lambda[i] * (v + 1), scale + std::abs(lambda[i]) * (v + 1));
    }
  };
  rec(0, 0.0, 0.0);
  return out;
}

const char* density_kind_name(const DensitySpec& rho) {
  if (std::holds_alternative<ExpLinearDensity>(rho)) return "ExpLinear";
  if (std::holds_alternative<MonomialDensity>(rho)) return "Monomial";
  return "SmoothedMonomial";
}

namespace {

double monomial(const std::vector<int>& r, const Vector& y, bool absolute) {
  double v = 1.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double c = absolute ? std::abs(y[static_cast<Eigen::Index>(i)]) : y[static_cast<Eigen::Index>(i)];
    v *= std::pow(c, r[i]);
  }
  return v;
}

void check_exponents(const std::vector<int>& r, int n) {
  if (static_cast<int>(r.size()) != n) throw InvalidInput("density: exponent vector length");
  for (int v : r)
    if (v < 0) throw InvalidInput("density: exponents must be non-negative");
}

// Fourth-order central differences of div(rho F).
double fd_divergence(const std::function<double(const Vector&)>& rho, const FieldSpec& f,
                     const Vector& x) {
  constexpr double h = 1e-3;
  const auto n = x.size();
  double div = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    auto g = [&](double s) {
      Vector y = x;
      y[j] += s;
      return rho(y) * f.eval_unchecked(y)[j];
    };
    div += (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h);
  }
  return div;
}

}  // namespace

double density_value(const DensitySpec& rho, const Vector& xi, double u) {
  if (const auto* e = std::get_if<ExpLinearDensity>(&rho)) return std::exp(-u * e->d);
  if (const auto* m = std::get_if<MonomialDensity>(&rho)) {
    const Vector y = m->basis ? Vector(m->basis->partialPivLu().solve(xi)) : xi;
    return monomial(m->r, y, false);
  }
  const auto& s = std::get<SmoothedMonomialDensity>(rho);
  double f = 1.0;
  for (std::size_t i = 0; i < s.r.size(); ++i)
    f *= std::pow(std::abs(xi[static_cast<Eigen::Index>(i)]), s.r[i] + 1);
  if (f == 0.0) return 0.0;
  return std::exp(-1.0 / f) * monomial(s.r, xi, true);
}

double density_residual(const DensitySpec& rho, const FieldSpec& f,
                        const std::vector<Vector>& points) {
  const int n = f.dim();
  for (const auto& p : points)
    if (p.size() != n) throw InvalidInput("density_residual: point dimension mismatch");
  double worst = 0.0;

  if (const auto* e = std::get_if<ExpLinearDensity>(&rho)) {
    for (const auto& xi : points) {
      const double div = f.divergence(xi).value;
      const double s = std::sqrt(std::max(0.0, 1.0 - xi.squaredNorm()));
      for (double eta : {s, -s})
        for (double u : {-1.0, 0.0, 1.0})
          worst = std::max(worst, std::abs(std::exp(-u * e->d) * eta * (div - e->d)));
    }
    return worst;
  }

  if (const auto* m = std::get_if<MonomialDensity>(&rho)) {
    check_exponents(m->r, n);
    if (auto lin = f.linear_matrix()) {
      Matrix g = *lin;
      std::vector<Vector> ys = points;
      if (m->basis) {
        const auto lu = m->basis->partialPivLu();
        g = lu.solve(*lin * *m->basis);
        for (auto& y : ys) y = lu.solve(y);
      }
      const simd::PointBatch batch = simd::PointBatch::from_points(ys);
      std::vector<double> out(ys.size());
      simd::monomial_divergence(g, m->r, batch, out);
      for (double v : out) worst = std::max(worst, std::abs(v));
      return worst;
    }
  } else {
    check_exponents(std::get<SmoothedMonomialDensity>(rho).r, n);
  }

  auto value = [&rho](const Vector& x) { return density_value(rho, x); };
  for (const auto& x : points) worst = std::max(worst, std::abs(fd_divergence(value, f, x)));
  return worst;
}

std::vector<Vector> density_grid(int n, int res, double min_abs) {
  if (n < 1 || res < 1) throw InvalidInput("density_grid: bad dimensions");
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Vector x(n);
    for (int d = 0; d < n; ++d) x[d] = -1.0 + (2.0 * idx[static_cast<std::size_t>(d)] + 1.0) / res;
    if (x.squaredNorm() < 1.0 && x.cwiseAbs().minCoeff() > min_abs) out.push_back(x);
    int d = 0;
    while (d < n && idx[static_cast<std::size_t>(d)] == res - 1) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == n) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  return out;
}

}  // namespace lfsys
