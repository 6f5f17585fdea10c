#pragma once

// Least-squares fits of tabulated values against powers of L = log n.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "regcomp/poisson_engine.hpp"

namespace regcomp {

struct FitResult {
  std::vector<double> coefficients;  // a_k for L^k, k = degree..0
  double residual_rms = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  double condition_number = 0.0;     // of the (column-scaled) design matrix
  std::int64_t points = 0;

  /// Coefficient of L^k.
  double coefficient(int k) const {
    return coefficients[coefficients.size() - 1 - static_cast<std::size_t>(k)];
  }
};

/// Fits y ≈ Σ_k a_k (log x)^k over the points with x in [lo, hi]. Powers listed in
/// `fixed` are held at the given values and reported as such.
FitResult fit_log_polynomial(std::span<const double> x, std::span<const double> y, int degree, double lo, double hi,
                             const std::map<int, double>& fixed = {});

/// Table indexed by n (values[n]); every integer n in the window is used.
FitResult fit_log_polynomial(std::span<const double> values, int degree, double lo, double hi,
                             const std::map<int, double>& fixed = {});

/// Poisson curve against L = log ρ on its grid points.
FitResult fit_log_polynomial(const PoissonMomentCurve& curve, int degree, double lo, double hi,
                             const std::map<int, double>& fixed = {});

}  // namespace regcomp
