#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "doctest.h"
#include "regcomp/kernels.hpp"

using namespace regcomp::simd;

namespace {

std::vector<double> randoms(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("every available kernel table agrees with the scalar reference") {
  const auto& ref = kernels_for(Isa::Scalar);
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    const auto& k = kernels_for(isa);
    CHECK(k.isa == isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1000u}) {
      CAPTURE(n);
      const auto a = randoms(n, 1), b = randoms(n, 2);
      const double tol = 1e-14 * static_cast<double>(n + 1);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tol);
      CHECK(std::abs(k.sum(a.data(), n) - ref.sum(a.data(), n)) <= tol);

      auto y1 = b, y2 = b;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

      const auto upper = randoms(n + 1, 3);
      std::vector<double> l1(n), l2(n);
      k.descend_row(upper.data(), l1.data(), n);
      ref.descend_row(upper.data(), l2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(l1[i] - l2[i]) <= 1e-15 * (1 + l2[i]));

      std::vector<std::vector<double>> rows;
      std::vector<const double*> ptrs;
      for (unsigned j = 0; j < 5; ++j) rows.push_back(randoms(n, 10 + j));
      for (const auto& r : rows) ptrs.push_back(r.data());
      std::vector<double> o1(5), o2(5);
      k.dot_many(a.data(), ptrs.data(), 5, n, o1.data());
      ref.dot_many(a.data(), ptrs.data(), 5, n, o2.data());
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(o1[j] - o2[j]) <= tol);
    }
  }
}

TEST_CASE("scalar reference values") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(scalar::dot(a.data(), b.data(), 3) == 32.0);
  CHECK(scalar::sum(a.data(), 3) == 6.0);
  // n = 2: lower[i] = ((2 - i) u[i] + (i + 2) u[i+1]) / 3
  const std::vector<double> u{1.0, 2.0, 3.0};
  std::vector<double> l(2);
  scalar::descend_row(u.data(), l.data(), 2);
  CHECK(l[0] == doctest::Approx((2 * 1.0 + 2 * 2.0) / 3));
  CHECK(l[1] == doctest::Approx((1 * 2.0 + 3 * 3.0) / 3));
}

TEST_CASE("dispatch") {
  CHECK(isa_available(Isa::Scalar));
  CHECK(isa_available(detect_isa()));
  const Isa before = kernels().isa;
  set_active_isa(Isa::Scalar);
  CHECK(kernels().isa == Isa::Scalar);
  set_active_isa(before);
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (!isa_available(isa)) CHECK_THROWS_AS(kernels_for(isa), std::invalid_argument);
}
