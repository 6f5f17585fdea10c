#include "regcomp/kernels.hpp"

namespace regcomp::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out) {
  for (std::size_t j = 0; j < k; ++j) out[j] = dot(w, hs[j], n);
}

void descend_row(const double* upper, double* lower, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = static_cast<double>(n - i);
    const double right = static_cast<double>(i + 2);
    lower[i] = (left * upper[i] + right * upper[i + 1]) * inv;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

}  // namespace regcomp::simd::scalar
