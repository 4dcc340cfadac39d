#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lfsys/core/linalg.hpp"

// Batch kernels over many points of R^n. Each kernel has a scalar reference
// and an AVX2 variant; the variant is chosen once at runtime from CPUID and
// can be forced back to scalar for equivalence testing.

namespace lfsys::simd {

enum class Isa { Scalar, Avx2 };

/// Best instruction set available on this CPU.
Isa detected_isa();
/// Instruction set the dispatching entry points currently use.
Isa active_isa();
/// Force an instruction set (falls back to Scalar if unsupported).
void set_isa(Isa isa);
const char* isa_name(Isa isa);

/// Structure-of-arrays point set: coordinate d of point i lives at
/// data[d * count + i].
class PointBatch {
 public:
  PointBatch() = default;
  PointBatch(std::size_t dim, std::size_t count)
      : dim_(dim), count_(count), data_(dim * count, 0.0) {}

  static PointBatch from_points(const std::vector<Vector>& points);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  std::span<double> coord(std::size_t d) { return {data_.data() + d * count_, count_}; }
  std::span<const double> coord(std::size_t d) const {
    return {data_.data() + d * count_, count_};
  }
  double at(std::size_t d, std::size_t i) const { return data_[d * count_ + i]; }
  double& at(std::size_t d, std::size_t i) { return data_[d * count_ + i]; }
  Vector point(std::size_t i) const;

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

/// out[i] = x_i^T P x_i
void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out);

/// out[i] = div(rho F)(x_i) for rho(x) = prod_j x_j^{r_j} and linear F,
/// computed as rho tr F + sum_j (F x)_j d rho / d x_j.
void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out);

/// max_i | sum_d x_{d,i}^2 - target |
double max_norm2_deviation(const PointBatch& x, double target);

namespace scalar {
void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out);
void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out);
double max_norm2_deviation(const PointBatch& x, double target);
}  // namespace scalar

namespace avx2 {
bool supported();
void quadratic_form(const Matrix& p, const PointBatch& x, std::span<double> out);
void monomial_divergence(const Matrix& f, std::span<const int> r, const PointBatch& x,
                         std::span<double> out);
double max_norm2_deviation(const PointBatch& x, double target);
}  // namespace avx2

}  // namespace lfsys::simd
