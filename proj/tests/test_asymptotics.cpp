#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "regcomp/asymptotics.hpp"
#include "regcomp/special_functions.hpp"

using namespace regcomp;

TEST_CASE("mean and variance expansions") {
  for (double theta : {0.5, 1.0, 2.0}) {
    const auto g = SubordinatorModel::gamma(theta);
    CHECK(mean_expansion(g).coefficient(2) == doctest::Approx(theta / 2).epsilon(1e-12));
    CHECK(variance_leading(g) == doctest::Approx(theta / 3).epsilon(1e-12));
    CHECK(mean_expansion(g).coefficient(0) == 0.0);
  }
  CHECK(mean_expansion(SubordinatorModel::gamma(1.0)).coefficient(1) == doctest::Approx(0.5).epsilon(1e-12));
  const double theta = 2.5;
  CHECK(mean_expansion(SubordinatorModel::ewens_like(theta)).coefficient(2) ==
        doctest::Approx(1 / (2 * special::polygamma(1, theta))).epsilon(1e-10));
  CHECK(std::abs(variance_leading(SubordinatorModel::geometric_atoms()) - 0.2440) < 1e-4);
  const auto e = mean_expansion(SubordinatorModel::gamma(1.0));
  CHECK(e.evaluate(2.0) == doctest::Approx(0.5 * 4 + 0.5 * 2));
}

TEST_CASE("scale-family coherence") {
  const auto g = SubordinatorModel::gamma(1.7);
  const double m1 = g.log_moment(1), m2 = g.log_moment(2);
  const double numeric = mean_expansion(g).coefficient(2) / variance_leading(g);
  CHECK(std::abs(numeric - 3 * m1 * m1 / (2 * m2)) < 1e-12);
  CHECK(std::abs(numeric - 1.5) < 1e-12);
}

TEST_CASE("CLT normalisation") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto n = static_cast<std::int64_t>(std::llround(std::exp(10.0)));
  const double L = std::log(static_cast<double>(n));
  CHECK(std::abs(clt_normalize(g, n, L * L / 2)) < 1e-12);
  CHECK(std::abs(clt_normalize(g, n, L * L / 2 + std::sqrt(std::pow(L, 3) / 3)) - 1.0) < 1e-12);
  CHECK(std::abs(clt_normalize(g, 22026, 50 + std::sqrt(1000.0 / 3)) - 1.0) < 1e-4);
}

TEST_CASE("small parts") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto s1 = small_part_expansion(g, 1);
  CHECK(s1.mean.coefficient(1) == doctest::Approx(1.0));
  CHECK(s1.var_leading == doctest::Approx(2.0));
  CHECK(s1.d1 == doctest::Approx(0.5).epsilon(1e-12));
  const auto cov = covariance_prediction(g, 10);
  CHECK(cov(0, 1) == doctest::Approx(0.5));
  for (int r = 1; r <= 10; ++r)
    CHECK(cov(r - 1, r - 1) == doctest::Approx(small_part_expansion(g, r).var_leading).epsilon(1e-12));
  CHECK((cov - cov.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);

  const auto c1 = cumulative_small_parts(g, 1);
  CHECK(c1.mean_leading == doctest::Approx(s1.mean.coefficient(1)));
  CHECK(c1.var_leading == doctest::Approx(s1.var_leading));
  const auto c2 = cumulative_small_parts(g, 2);
  CHECK(c2.mean_leading == doctest::Approx(1.5));
  CHECK(c2.var_leading == doctest::Approx(3.75));
  const auto big = cumulative_small_parts(g, 100000);
  CHECK(std::abs(big.mean_leading - (std::log(1e5) + special::kEulerGamma)) < 1e-4);
}

TEST_CASE("oscillation of the geometric-atom transform") {
  for (double u : {0.1, 0.37, 0.9}) CHECK(oscillation_phi(u + 1.0) == doctest::Approx(oscillation_phi(u)).epsilon(1e-12));
  double top = 0.0;
  for (int i = 0; i < 1000; ++i) top = std::max(top, std::abs(oscillation_phi(i / 1000.0)));
  CHECK(top > 5e-5);
  CHECK(top < 1.04e-4);
  CHECK(oscillation_truncation_bound(5) < 1e-20);
  // The transform minus L settles to γ − 1/2 plus the oscillation.
  const auto geom = SubordinatorModel::geometric_atoms();
  for (double L : {10.0, 11.3, 13.9}) {
    const double d = geom.poisson_laplace(std::exp(L)) - L - (special::kEulerGamma - 0.5);
    CHECK(std::abs(d - oscillation_phi(L)) < 1e-6);
  }
}
