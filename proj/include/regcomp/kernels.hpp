#pragma once

// Data-parallel inner loops of the exact engine. Every kernel has a scalar
// reference implementation and vector variants chosen once at runtime.

#include <cstddef>
#include <string_view>

namespace regcomp::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  /// Σ a[i] b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// out[j] = Σ_i w[i] hs[j][i] for j < k; the weight row is streamed once.
  void (*dot_many)(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out);
  /// One step of the binomial-moment descent:
  /// lower[i] = ((n - i) upper[i] + (i + 2) upper[i + 1]) / (n + 1), i < n.
  void (*descend_row)(const double* upper, double* lower, std::size_t n);
  /// y[i] += alpha x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Σ x[i]
  double (*sum)(const double* x, std::size_t n);
};

Isa detect_isa();
bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

/// Kernels for the active ISA. The initial choice honours REGCOMP_SIMD=scalar|avx2|neon.
const KernelTable& kernels();
/// Kernels for a specific ISA; throws std::invalid_argument if unavailable on this CPU/build.
const KernelTable& kernels_for(Isa isa);
/// Overrides the active ISA for the rest of the process.
void set_active_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out);
void descend_row(const double* upper, double* lower, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
}  // namespace scalar

#if defined(REGCOMP_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out);
void descend_row(const double* upper, double* lower, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(REGCOMP_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void dot_many(const double* w, const double* const* hs, std::size_t k, std::size_t n, double* out);
void descend_row(const double* upper, double* lower, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
}  // namespace neon
#endif

}  // namespace regcomp::simd
