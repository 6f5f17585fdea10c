#include <arm_neon.h>

#include "regcomp/kernels.hpp"

namespace regcomp::simd::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out) {
  constexpr std::size_t kGroup = 4;
  for (std::size_t j0 = 0; j0 < k; j0 += kGroup) {
    const std::size_t g = (k - j0 < kGroup) ? k - j0 : kGroup;
    float64x2_t acc[kGroup];
    for (std::size_t j = 0; j < g; ++j) acc[j] = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const float64x2_t wv = vld1q_f64(w + i);
      for (std::size_t j = 0; j < g; ++j) acc[j] = vfmaq_f64(acc[j], wv, vld1q_f64(hs[j0 + j] + i));
    }
    for (std::size_t j = 0; j < g; ++j) {
      double s = vaddvq_f64(acc[j]);
      for (std::size_t t = i; t < n; ++t) s += w[t] * hs[j0 + j][t];
      out[j0 + j] = s;
    }
  }
}

void descend_row(const double* upper, double* lower, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n + 1);
  const float64x2_t vinv = vdupq_n_f64(inv);
  const float64x2_t two = vdupq_n_f64(2.0);
  const double l0[2] = {static_cast<double>(n), static_cast<double>(n) - 1.0};
  const double r0[2] = {2.0, 3.0};
  float64x2_t left = vld1q_f64(l0);
  float64x2_t right = vld1q_f64(r0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vfmaq_f64(vmulq_f64(right, vld1q_f64(upper + i + 1)), left, vld1q_f64(upper + i));
    vst1q_f64(lower + i, vmulq_f64(v, vinv));
    left = vsubq_f64(left, two);
    right = vaddq_f64(right, two);
  }
  for (; i < n; ++i) {
    lower[i] = (static_cast<double>(n - i) * upper[i] + static_cast<double>(i + 2) * upper[i + 1]) * inv;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

}  // namespace regcomp::simd::neon
