#include <cmath>
#include <vector>

#include "lfsys/core/errors.hpp"
#include "lfsys/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LFSYS_X86 1
#include <immintrin.h>
#else
#define LFSYS_X86 0
#endif

namespace lfsys::simd::avx2 {

#if LFSYS_X86

#define LFSYS_AVX2 __attribute__((target("avx2")))

bool supported() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kMaxDim = 16;

// Arithmetic mirrors the scalar reference term by term (mul then add, same
// order) so the two paths agree to the last bit on finite inputs.

LFSYS_AVX2 double hmax(__m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

}  // namespace

LFSYS_AVX2 void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out) {
  const std::size_t n = x.dim();
  const std::size_t count = x.count();
  if (static_cast<std::size_t>(p.rows()) != n || static_cast<std::size_t>(p.cols()) != n)
    throw InvalidInput("quadratic_form: matrix does not match point dimension");
  if (out.size() < count) throw InvalidInput("simd kernel: output span too small");

  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t a = 0; a < n; ++a) {
      __m256d row = _mm256_setzero_pd();
      for (std::size_t b = 0; b < n; ++b) {
        const __m256d coef =
            _mm256_set1_pd(p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        row = _mm256_add_pd(row, _mm256_mul_pd(coef, _mm256_loadu_pd(&x.coord(b)[i])));
      }
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&x.coord(a)[i]), row));
    }
    _mm256_storeu_pd(&out[i], acc);
  }
  for (; i < count; ++i) {
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

LFSYS_AVX2 void monomial_divergence(const Matrix& f, std::span<const int> r,
                                    const PointBatch& x, std::span<double> out) {
  const std::size_t n = x.dim();
  const std::size_t count = x.count();
  if (static_cast<std::size_t>(f.rows()) != n || r.size() != n)
    throw InvalidInput("monomial_divergence: dimension mismatch");
  if (out.size() < count) throw InvalidInput("simd kernel: output span too small");

  const double tr = f.trace();
  const __m256d vtr = _mm256_set1_pd(tr);
  if (n > kMaxDim) {
    scalar::monomial_divergence(f, r, x, out);
    return;
  }
  __m256d fx[kMaxDim], pw[kMaxDim], pw_minus[kMaxDim];
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    for (std::size_t a = 0; a < n; ++a) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t b = 0; b < n; ++b) {
        const __m256d coef =
            _mm256_set1_pd(f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(coef, _mm256_loadu_pd(&x.coord(b)[i])));
      }
      fx[a] = acc;
      const __m256d xa = _mm256_loadu_pd(&x.coord(a)[i]);
      __m256d pv = _mm256_set1_pd(1.0);
      __m256d pm = pv;
      for (int e = 0; e < r[a]; ++e) {
        pm = pv;
        pv = _mm256_mul_pd(pv, xa);
      }
      pw[a] = pv;
      pw_minus[a] = pm;
    }
    __m256d rho = _mm256_set1_pd(1.0);
    for (std::size_t a = 0; a < n; ++a) rho = _mm256_mul_pd(rho, pw[a]);
    __m256d grad_dot = _mm256_setzero_pd();
    for (std::size_t a = 0; a < n; ++a) {
      if (r[a] == 0) continue;
      __m256d partial = _mm256_mul_pd(_mm256_set1_pd(static_cast<double>(r[a])), pw_minus[a]);
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) partial = _mm256_mul_pd(partial, pw[b]);
      grad_dot = _mm256_add_pd(grad_dot, _mm256_mul_pd(fx[a], partial));
    }
    _mm256_storeu_pd(&out[i], _mm256_add_pd(_mm256_mul_pd(rho, vtr), grad_dot));
  }
  if (i < count) {
    // Tail through the reference path on a copy of the remaining points.
    PointBatch tail(n, count - i);
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t j = i; j < count; ++j) tail.at(d, j - i) = x.at(d, j);
    scalar::monomial_divergence(f, r, tail, out.subspan(i));
  }
}

LFSYS_AVX2 double max_norm2_deviation(const PointBatch& x, double target) {
  const std::size_t count = x.count();
  const __m256d vt = _mm256_set1_pd(target);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d worst = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t d = 0; d < x.dim(); ++d) {
      const __m256d v = _mm256_loadu_pd(&x.coord(d)[i]);
      s = _mm256_add_pd(s, _mm256_mul_pd(v, v));
    }
    const __m256d dev = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(s, vt));
    worst = _mm256_max_pd(worst, dev);
  }
  double result = hmax(worst);
  for (; i < count; ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.dim(); ++d) s += x.at(d, i) * x.at(d, i);
    result = std::max(result, std::abs(s - target));
  }
  return result;
}

#else  // no x86: the AVX2 entry points forward to the reference kernels

bool supported() { return false; }
void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out) {
  scalar::quadratic_form(p, x, out);
}
void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out) {
  scalar::monomial_divergence(f, r, x, out);
}
double max_norm2_deviation(const PointBatch& x, double target) {
  return scalar::max_norm2_deviation(x, target);
}

#endif

}  // namespace lfsys::simd::avx2
