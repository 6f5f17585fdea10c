#include <immintrin.h>

#include "regcomp/kernels.hpp"

namespace regcomp::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out) {
  constexpr std::size_t kGroup = 6;
  for (std::size_t j0 = 0; j0 < k; j0 += kGroup) {
    const std::size_t g = (k - j0 < kGroup) ? k - j0 : kGroup;
    __m256d acc[kGroup];
    for (std::size_t j = 0; j < g; ++j) acc[j] = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d wv = _mm256_loadu_pd(w + i);
      for (std::size_t j = 0; j < g; ++j) acc[j] = _mm256_fmadd_pd(wv, _mm256_loadu_pd(hs[j0 + j] + i), acc[j]);
    }
    for (std::size_t j = 0; j < g; ++j) {
      double s = hsum(acc[j]);
      for (std::size_t t = i; t < n; ++t) s += w[t] * hs[j0 + j][t];
      out[j0 + j] = s;
    }
  }
}

void descend_row(const double* upper, double* lower, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n + 1);
  const __m256d vinv = _mm256_set1_pd(inv);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d left = _mm256_setr_pd(static_cast<double>(n), static_cast<double>(n) - 1.0,
                                static_cast<double>(n) - 2.0, static_cast<double>(n) - 3.0);
  __m256d right = _mm256_setr_pd(2.0, 3.0, 4.0, 5.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u0 = _mm256_loadu_pd(upper + i);
    const __m256d u1 = _mm256_loadu_pd(upper + i + 1);
    const __m256d v = _mm256_fmadd_pd(left, u0, _mm256_mul_pd(right, u1));
    _mm256_storeu_pd(lower + i, _mm256_mul_pd(v, vinv));
    left = _mm256_sub_pd(left, four);
    right = _mm256_add_pd(right, four);
  }
  for (; i < n; ++i) {
    lower[i] = (static_cast<double>(n - i) * upper[i] + static_cast<double>(i + 2) * upper[i + 1]) * inv;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

}  // namespace regcomp::simd::avx2
