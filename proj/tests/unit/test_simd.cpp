#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lfsys/core/types.hpp"
#include "lfsys/simd/kernels.hpp"

using namespace lfsys;

namespace {

simd::PointBatch random_batch(std::size_t dim, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  simd::PointBatch b(dim, count);
  for (std::size_t d = 0; d < dim; ++d)
    for (std::size_t i = 0; i < count; ++i) b.at(d, i) = rng.uniform(-1.0, 1.0);
  return b;
}

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
  return m;
}

class IsaGuard {
 public:
  IsaGuard() : saved_(simd::active_isa()) {}
  ~IsaGuard() { simd::set_isa(saved_); }

 private:
  simd::Isa saved_;
};

}  // namespace

TEST(Simd, ScalarQuadraticFormMatchesEigen) {
  const Matrix p = random_matrix(3, 1);
  const simd::PointBatch x = random_batch(3, 37, 2);
  std::vector<double> out(x.count());
  simd::scalar::quadratic_form(p, x, out);
  for (std::size_t i = 0; i < x.count(); ++i) {
    const Vector v = x.point(i);
    EXPECT_NEAR(out[i], v.dot(p * v), 1e-14);
  }
}

TEST(Simd, ScalarMonomialDivergenceMatchesFiniteDifferences) {
  const Matrix f = random_matrix(3, 3);
  const std::vector<int> r{2, 1, 3};
  const simd::PointBatch x = random_batch(3, 11, 4);
  std::vector<double> out(x.count());
  simd::scalar::monomial_divergence(f, r, x, out);
  auto g = [&](const Vector& v) {
    double rho = 1.0;
    for (int j = 0; j < 3; ++j) rho *= std::pow(v[j], r[static_cast<std::size_t>(j)]);
    return Vector(rho * (f * v));
  };
  for (std::size_t i = 0; i < x.count(); ++i) {
    const Vector v = x.point(i);
    double div = 0.0;
    const double h = 1e-5;
    for (int j = 0; j < 3; ++j) {
      Vector a = v, b = v;
      a[j] += h;
      b[j] -= h;
      div += (g(a)[j] - g(b)[j]) / (2 * h);
    }
    EXPECT_NEAR(out[i], div, 1e-8);
  }
}

TEST(Simd, ScalarNormDeviation) {
  simd::PointBatch x(2, 3);
  x.at(0, 0) = 1.0;
  x.at(1, 1) = 0.5;
  x.at(0, 2) = 0.6;
  x.at(1, 2) = 0.8;
  EXPECT_NEAR(simd::scalar::max_norm2_deviation(x, 1.0), 0.75, 1e-15);
}

TEST(Simd, Avx2MatchesScalar) {
  if (!simd::avx2::supported()) GTEST_SKIP() << "AVX2 not available";
  for (std::size_t dim : {1u, 2u, 3u, 5u}) {
    for (std::size_t count : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
      const simd::PointBatch x = random_batch(dim, count, 10 * dim + count);
      const Matrix p = random_matrix(dim, dim + 100);
      std::vector<double> a(count), b(count);
      simd::scalar::quadratic_form(p, x, a);
      simd::avx2::quadratic_form(p, x, b);
      for (std::size_t i = 0; i < count; ++i) EXPECT_NEAR(a[i], b[i], 1e-13 * (1 + std::abs(a[i])));

      std::vector<int> r(dim);
      for (std::size_t d = 0; d < dim; ++d) r[d] = static_cast<int>((d * 3 + 1) % 5);
      simd::scalar::monomial_divergence(p, r, x, a);
      simd::avx2::monomial_divergence(p, r, x, b);
      for (std::size_t i = 0; i < count; ++i) EXPECT_NEAR(a[i], b[i], 1e-13 * (1 + std::abs(a[i])));

      EXPECT_NEAR(simd::scalar::max_norm2_deviation(x, 0.7), simd::avx2::max_norm2_deviation(x, 0.7), 1e-14);
    }
  }
}

TEST(Simd, DispatchFollowsSetIsa) {
  IsaGuard guard;
  simd::set_isa(simd::Isa::Scalar);
  EXPECT_EQ(simd::active_isa(), simd::Isa::Scalar);
  simd::set_isa(simd::Isa::Avx2);
  EXPECT_EQ(simd::active_isa(), simd::avx2::supported() ? simd::Isa::Avx2 : simd::Isa::Scalar);
  EXPECT_EQ(simd::detected_isa(), simd::avx2::supported() ? simd::Isa::Avx2 : simd::Isa::Scalar);
  EXPECT_STREQ(simd::isa_name(simd::Isa::Scalar), "scalar");
}

TEST(Simd, DispatchedResultsAgreeAcrossIsas) {
  IsaGuard guard;
  const simd::PointBatch x = random_batch(2, 513, 77);
  const Matrix p = random_matrix(2, 78);
  std::vector<double> a(x.count()), b(x.count());
  simd::set_isa(simd::Isa::Scalar);
  simd::quadratic_form(p, x, a);
  const double da = simd::max_norm2_deviation(x, 1.0);
  simd::set_isa(simd::detected_isa());
  simd::quadratic_form(p, x, b);
  const double db = simd::max_norm2_deviation(x, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-13);
  EXPECT_NEAR(da, db, 1e-14);
}
