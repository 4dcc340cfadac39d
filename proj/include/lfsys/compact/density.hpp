#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lfsys/core/field.hpp"

namespace lfsys {

/// exp(-u div F) when div F is constant. Throws Unsupported otherwise.
double invariant_density(const FieldSpec& f, double u);

struct Resonance {
  std::vector<int> r;
  bool even = false;  // all entries even: prod xi_i^{r_i} is real-analytic
};

/// All r in {0..r_max}^n with sum lambda_i (r_i + 1) = 0 (relative tolerance).
std::vector<Resonance> resonance_search(const std::vector<double>& lambda, int r_max,
                                        double rel_tol = 1e-9);

/// rho(u) = exp(-u d) on TM.
struct ExpLinearDensity {
  double d = 0.0;
};

/// rho(xi) = prod_i y_i^{r_i} with y = V^{-1} xi (V = identity by default).
struct MonomialDensity {
  std::vector<int> r;
  std::optional<Matrix> basis;
};

/// rho(xi) = exp(-1/f) prod_i |xi_i|^{r_i}, f = prod_i |xi_i|^{r_i + 1}.
struct SmoothedMonomialDensity {
  std::vector<int> r;
};

using DensitySpec = std::variant<ExpLinearDensity, MonomialDensity, SmoothedMonomialDensity>;
const char* density_kind_name(const DensitySpec& rho);

double density_value(const DensitySpec& rho, const Vector& xi, double u = 0.0);

/// max |div(rho F)| over the points. Monomial densities with linear F use the
/// exact batch kernel; the exp-linear density uses the closed form
/// rho eta (div F - d) of the lifted field on TM, over eta = +-sqrt(1 - |xi|^2)
/// and u in {-1, 0, 1}; everything else central differences.
double density_residual(const DensitySpec& rho, const FieldSpec& f,
                        const std::vector<Vector>& points);

/// Cell centres of a res^n grid on [-1,1]^n inside the open unit ball, with
/// every |xi_i| > min_abs.
std::vector<Vector> density_grid(int n, int res, double min_abs = 0.0);

}  // namespace lfsys
