#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <cmath>

#include "doctest.h"
#include "regcomp/errors.hpp"
#include "regcomp/special_functions.hpp"

using namespace regcomp;
using namespace regcomp::special;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double crel(ComplexValue a, ComplexValue b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("log_gamma against Boost") {
  for (double x : {1e-8, 1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 123.456, 1e4, 1e7})
    CHECK(std::abs(log_gamma(x) - boost::math::lgamma(x)) <= 1e-14 * std::max(1.0, std::abs(boost::math::lgamma(x))));
  CHECK(rel(log_gamma(1e-3), 6.907178885383853683) < 1e-14);
  CHECK(rel(log_gamma(123.456), 469.6055471299294687) < 1e-14);
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("complex gamma on the imaginary axis and in the strip") {
  CHECK(crel(complex_gamma({0.0, 2 * kPi}), {-1.26222667992355811e-5, -5.01594096050098546e-5}) < 1e-12);
  CHECK(crel(complex_gamma({0.0, 4 * kPi}), {1.740782425718358e-9, -7.404454496471222e-10}) < 1e-11);
  CHECK(crel(complex_gamma({0.5, 3.0}), {0.02144567055243064606, 0.006865364837261677914}) < 1e-13);
  CHECK(crel(complex_gamma({-2.5, 1.0}), {-0.04173662580789361374, -0.08636910736976348469}) < 1e-13);
  for (double x : {0.3, 1.0, 4.5, 9.9}) CHECK(rel(complex_gamma({x, 0.0}).real(), boost::math::tgamma(x)) < 1e-13);
  // |Γ(iy)|² = π / (y sinh πy)
  for (double y : {0.5, 3.0, 20.0}) {
    const double m2 = std::norm(complex_gamma({0.0, y}));
    CHECK(rel(m2, kPi / (y * std::sinh(kPi * y))) < 1e-11);
  }
  CHECK_THROWS_AS(complex_gamma({0.0, 0.0}), PoleError);
  CHECK_THROWS_AS(complex_gamma({-3.0, 0.0}), PoleError);
}

TEST_CASE("polygamma against Boost") {
  for (int k = 0; k <= 6; ++k)
    for (double x : {0.05, 0.3, 1.0, 2.5, 17.0, 400.0})
      CHECK(rel(polygamma(k, x), boost::math::polygamma(k, x)) < 1e-12);
  CHECK(rel(polygamma(1, 0.3), 12.24536454610773047) < 1e-13);
  CHECK(rel(polygamma(3, 2.5), 0.2239058488172520513) < 1e-13);
  CHECK(rel(digamma(1.0), -kEulerGamma) < 1e-15);
}

TEST_CASE("complex digamma reduces to the real one") {
  for (double x : {0.2, 1.0, 7.5}) CHECK(rel(complex_digamma({x, 0.0}).real(), boost::math::digamma(x)) < 1e-13);
  // Im ψ(1 + iy) = -1/(2y) + (π/2) coth(πy)
  const double y = 1.3;
  CHECK(std::abs(complex_digamma({1.0, y}).imag() - (-1 / (2 * y) + kPi / 2 / std::tanh(kPi * y))) < 1e-13);
}

TEST_CASE("beta, gamma ratio, binomial, harmonic") {
  CHECK(rel(log_beta(2.5, 0.7), std::log(boost::math::beta(2.5, 0.7))) < 1e-13);
  CHECK(rel(log_gamma_ratio(1e6, 0.5, 0.0), boost::math::lgamma(1e6 + 0.5) - boost::math::lgamma(1e6)) < 1e-9);
  CHECK(std::abs(log_gamma_ratio(5.0, 1.0, 0.0) - std::log(5.0)) < 1e-14);
  CHECK(std::abs(log_binomial(10, 3) - std::log(120.0)) < 1e-13);
  CHECK(log_binomial(7, 0) == 0.0);
  CHECK(rel(log_binomial(100000, 50000), boost::math::lgamma(100001.0) - 2 * boost::math::lgamma(50001.0)) < 1e-12);
  CHECK(harmonic(1) == 1.0);
  CHECK(rel(harmonic(4), 25.0 / 12.0) < 1e-15);
  CHECK(rel(harmonic(1000000), boost::math::digamma(1000001.0) + kEulerGamma) < 1e-13);
}

TEST_CASE("E1 and the normal CDF") {
  CHECK(rel(expint_e1(0.5), 0.5597735947761608117) < 1e-14);
  CHECK(rel(expint_e1(20.0), 9.835525290649881690e-11) < 1e-13);
  for (double x : {1e-6, 0.01, 1.0, 3.0, 60.0}) CHECK(rel(expint_e1(x), boost::math::expint(1, x)) < 1e-13);
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rel(normal_cdf(-5.0), 2.866515718791939e-7) < 1e-12);
  CHECK(rel(normal_cdf(1.0), 0.8413447460685429) < 1e-14);
}

TEST_CASE("Poisson tail bounds dominate the tails") {
  const double mean = 50.0;
  double upper = 0.0;
  for (int k = 200; k >= 80; --k) upper += std::exp(-mean + k * std::log(mean) - boost::math::lgamma(k + 1.0));
  CHECK(poisson_upper_tail_bound(mean, 80) >= upper);
  CHECK(poisson_upper_tail_bound(mean, 80) < 1e-3);
  CHECK(poisson_upper_tail_bound(mean, 40) == 1.0);
  double lower = 0.0;
  for (int k = 0; k <= 25; ++k) lower += std::exp(-mean + k * std::log(mean) - boost::math::lgamma(k + 1.0));
  CHECK(poisson_lower_tail_bound(mean, 25) >= lower);
  CHECK(poisson_lower_tail_bound(mean, 60) == 1.0);
}
