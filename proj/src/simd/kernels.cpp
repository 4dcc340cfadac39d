#include "lfsys/simd/kernels.hpp"

#include <atomic>
#include <cmath>

#include "lfsys/core/errors.hpp"

namespace lfsys::simd {

namespace {

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

void check_out(std::size_t got, std::size_t want) {
  if (got < want) throw InvalidInput("simd kernel: output span too small");
}

}  // namespace

Isa detected_isa() { return avx2::supported() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2::supported()) isa = Isa::Scalar;
  active().store(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

PointBatch PointBatch::from_points(const std::vector<Vector>& points) {
  if (points.empty()) return {};
  const auto dim = static_cast<std::size_t>(points.front().size());
  PointBatch b(dim, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<std::size_t>(points[i].size()) != dim)
      throw InvalidInput("PointBatch: points of mixed dimension");
    for (std::size_t d = 0; d < dim; ++d) b.at(d, i) = points[i](static_cast<Eigen::Index>(d));
  }
  return b;
}

Vector PointBatch::point(std::size_t i) const {
  Vector v(static_cast<Eigen::Index>(dim_));
  for (std::size_t d = 0; d < dim_; ++d) v(static_cast<Eigen::Index>(d)) = at(d, i);
  return v;
}

void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::quadratic_form(p, x, out);
  scalar::quadratic_form(p, x, out);
}

void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::monomial_divergence(f, r, x, out);
  scalar::monomial_divergence(f, r, x, out);
}

double max_norm2_deviation(const PointBatch& x, double target) {
  if (active_isa() == Isa::Avx2) return avx2::max_norm2_deviation(x, target);
  return scalar::max_norm2_deviation(x, target);
}

namespace scalar {

void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out) {
  const std::size_t n = x.dim();
  if (static_cast<std::size_t>(p.rows()) != n || static_cast<std::size_t>(p.cols()) != n)
    throw InvalidInput("quadratic_form: matrix does not match point dimension");
  check_out(out.size(), x.count());
  for (std::size_t i = 0; i < x.count(); ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < n; ++b)
        row += p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * x.at(b, i);
      acc += x.at(a, i) * row;
    }
    out[i] = acc;
  }
}

void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out) {
  const std::size_t n = x.dim();
  if (static_cast<std::size_t>(f.rows()) != n || r.size() != n)
    throw InvalidInput("monomial_divergence: dimension mismatch");
  check_out(out.size(), x.count());
  const double tr = f.trace();
  std::vector<double> fx(n), pw(n), pw_minus(n);
  for (std::size_t i = 0; i < x.count(); ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < n; ++b)
        acc += f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * x.at(b, i);
      fx[a] = acc;
      // x^r and x^(r-1) by repeated multiplication.
      double p = 1.0, pm = 1.0;
      for (int e = 0; e < r[a]; ++e) {
        pm = p;
        p *= x.at(a, i);
      }
      pw[a] = p;
      pw_minus[a] = pm;
    }
    double rho = 1.0;
    for (std::size_t a = 0; a < n; ++a) rho *= pw[a];
    double grad_dot = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (r[a] == 0) continue;
      double partial = r[a] * pw_minus[a];
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) partial *= pw[b];
      grad_dot += fx[a] * partial;
    }
    out[i] = rho * tr + grad_dot;
  }
}

double max_norm2_deviation(const PointBatch& x, double target) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.count(); ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.dim(); ++d) s += x.at(d, i) * x.at(d, i);
    worst = std::max(worst, std::abs(s - target));
  }
  return worst;
}

}  // namespace scalar

}  // namespace lfsys::simd
