#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "regcomp/kernels.hpp"

namespace regcomp::simd {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, scalar::dot, scalar::dot_many, scalar::descend_row, scalar::axpy,
                              scalar::sum};
#if defined(REGCOMP_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::dot, avx2::dot_many, avx2::descend_row, avx2::axpy, avx2::sum};
#endif
#if defined(REGCOMP_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, neon::dot, neon::dot_many, neon::descend_row, neon::axpy, neon::sum};
#endif

Isa initial_isa() {
  if (const char* env = std::getenv("REGCOMP_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  return detect_isa();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{&kernels_for(initial_isa())};
  return table;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(REGCOMP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(REGCOMP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(REGCOMP_HAVE_AVX2)
    case Isa::Avx2:
      return kAvx2;
#endif
#if defined(REGCOMP_HAVE_NEON)
    case Isa::Neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace regcomp::simd
