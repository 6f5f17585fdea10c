#include <cmath>
#include <vector>

#include "doctest.h"
#include "regcomp/errors.hpp"
#include "regcomp/poisson_engine.hpp"
#include "test_helpers.hpp"

using namespace regcomp;

TEST_CASE("grid") {
  const auto g = RhoGrid::spanning(1e-3, 1.05, 1e3);
  CHECK(g.at(0) == 1e-3);
  CHECK(g.max() >= 1e3);
  CHECK(g.at(g.count - 2) < 1e3);
  CHECK(std::abs(g.step() - std::log(1.05)) < 1e-15);
  CHECK(g.nearest(g.at(17) * 1.01) == 17);
}

TEST_CASE("poissonise trivial tables") {
  std::vector<double> ones(400, 1.0);
  ones[0] = 0.0;
  for (double rho : {1e-3, 0.5, 7.0, 100.0}) CHECK(std::abs(poissonise_values(ones, rho).value + std::expm1(-rho)) < 1e-13);
  // E K_1 = 1 gives ρ + O(ρ²) at small ρ.
  const auto t = moments_all_parts(SubordinatorModel::gamma(1.0), 400);
  const double rho = 1e-5;
  CHECK(std::abs(poissonise(t, rho) / rho - 1.0) < 1e-4);
  CHECK_THROWS_AS(poissonise(t, 395.0), RangeError);
  const auto r = poissonise_values(ones, 200.0);
  CHECK(r.truncation_bound < 1e-12);
}

TEST_CASE("solver agrees with the poissonised exact table") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto tab = moments_all_parts(g, 900);
  const auto grid = RhoGrid::spanning(1e-3, 1.05, 600.0);
  const auto curves = solve_orders(g, PatternSpec::all(), 2, grid, 0.0);
  REQUIRE(curves.size() == 2);
  for (std::int64_t k = 0; k < grid.count; ++k) {
    const double rho = grid.at(k);
    // Right side of the first-order recursion is Φ̂(ρ); seeded points carry none.
    if (rho > 1e-2) CHECK(std::abs(curves[0].rhs[static_cast<std::size_t>(k)] - g.poisson_laplace(rho)) < 1e-10 * (1 + g.poisson_laplace(rho)));
    if (rho < 10.0 || rho > 600.0) continue;
    CHECK(std::abs(curves[0].values[static_cast<std::size_t>(k)] / poissonise(tab, rho) - 1.0) < 1e-5);
    CHECK(std::abs(curves[1].values[static_cast<std::size_t>(k)] / poissonise_factorial2(tab, rho) - 1.0) < 1e-4);
  }
  CHECK(std::abs(curves[0].at(500.0) / poissonise(tab, 500.0) - 1.0) < 1e-5);
  CHECK(curves[0].max_residual < 1e-6);
}

TEST_CASE("other models and patterns") {
  const auto grid = RhoGrid::spanning(1e-3, 1.05, 200.0);
  for (const auto& m : {SubordinatorModel::ewens_like(2.0), SubordinatorModel::geometric_atoms(),
                        SubordinatorModel::generic_from_csv(data_path("generic_example.csv"))}) {
    for (const auto& p : {PatternSpec::all(), PatternSpec::single(2), PatternSpec::odd()}) {
      CAPTURE(m.name());
      CAPTURE(p.description());
      const auto tab = moments_pattern(m, 400, p);
      const auto c = solve_recursion(m, p, 1, grid, 0.0);
      for (double rho : {1.0, 20.0, 150.0}) CHECK(std::abs(c.at(rho) / poissonise(tab, rho) - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("killing rate") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto grid = RhoGrid::spanning(1e-3, 1.05, 1e4);
  const auto heavy = solve_recursion(g, PatternSpec::all(), 1, grid, 1e6);
  for (double rho : {1.0, 10.0, 1e3}) CHECK(std::abs(heavy.at(rho) * 1e6 / g.poisson_laplace(rho) - 1.0) < 1e-4);
  const auto unit = solve_recursion(g, PatternSpec::all(), 1, grid, 1.0);
  const double d3 = unit.at(1e3) / std::log(1e3), d4 = unit.at(1e4) / std::log(1e4);
  CHECK(d4 > 0.1 * d3);
  CHECK(d4 < 10.0 * d3);
  CHECK(std::abs(d4 / d3 - 1.0) < 0.1);
  CHECK_THROWS(solve_recursion(g, PatternSpec::all(), 1, grid, -1.0));
}

TEST_CASE("grid refinement and factorial moment ordering") {
  const auto g = SubordinatorModel::ewens_like(1.5);
  const auto coarse = solve_recursion(g, PatternSpec::all(), 2, RhoGrid::spanning(1e-3, 1.1, 300.0), 0.0);
  const auto fine = solve_recursion(g, PatternSpec::all(), 2, RhoGrid::spanning(1e-3, 1.025, 300.0), 0.0);
  for (double rho : {5.0, 50.0, 250.0}) CHECK(std::abs(coarse.at(rho) / fine.at(rho) - 1.0) < 1e-4);
  const auto both = solve_orders(g, PatternSpec::all(), 2, RhoGrid::spanning(1e-3, 1.05, 300.0), 0.0);
  // E N(N-1) >= (E N)^2 - E N by Jensen.
  for (std::size_t k = 0; k < both[0].values.size(); ++k) {
    const double f1 = both[0].values[k], f2 = both[1].values[k];
    CHECK(f2 >= f1 * f1 - f1 - 1e-9);
  }
}

TEST_CASE("residual tolerance is enforced") {
  SolverOptions opt;
  opt.residual_tol = 1e-30;
  CHECK_THROWS_AS(solve_recursion(SubordinatorModel::gamma(1.0), PatternSpec::all(), 1,
                                  RhoGrid::spanning(1e-3, 1.3, 50.0), 0.0, opt),
                  AccuracyError);
}

TEST_CASE("distribution recursion") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto grid = RhoGrid::spanning(1e-3, 1.05, 50.0);
  const auto d = distribution_recursion(g, PatternSpec::all(), grid, 50);
  const auto f1 = solve_recursion(g, PatternSpec::all(), 1, grid, 0.0);
  REQUIRE(d.p.size() == 51);
  for (std::int64_t k = 0; k < grid.count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double rho = grid.at(k);
    if (rho > 50.0) break;
    CHECK(d.p[0][uk] == std::exp(-rho));
    double s = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < d.p.size(); ++j) {
      s += d.p[j][uk];
      mean += static_cast<double>(j) * d.p[j][uk];
    }
    // Discretisation error can push the sum a few 1e-7 past one.
    CHECK(std::abs(1.0 - s) < 1e-6);
    CHECK(std::abs(mean - f1.values[uk]) < 1e-4);
  }
  CHECK_THROWS(distribution_recursion(g, PatternSpec::all(), grid, 51));
}
