#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "regcomp/exact_engine.hpp"
#include "regcomp/montecarlo.hpp"
#include "regcomp/special_functions.hpp"
#include "test_helpers.hpp"

using namespace regcomp;

TEST_CASE("counter RNG") {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  CHECK(a.counter() == 100);
  CounterRng u(1, 0);
  double s = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    s += v;
  }
  CHECK(std::abs(s / 100000 - 0.5) < 0.005);
}

TEST_CASE("trivial compositions") {
  const auto g = SubordinatorModel::gamma(1.0);
  CounterRng rng(1, 0);
  for (int i = 0; i < 50; ++i) CHECK(sample_composition(g, 1, rng).parts == std::vector<std::int64_t>{1});

  const auto e = SubordinatorModel::ewens_like(1.0);
  const int reps = 100000;
  int split = 0;
  for (int i = 0; i < reps; ++i) split += sample_composition(e, 2, rng).parts.size() == 2;
  const double p = 2.0 / 3.0, se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(static_cast<double>(split) / reps - p) < 3 * se);
}

TEST_CASE("lazy inversion equals full inversion") {
  const auto g = SubordinatorModel::gamma(0.8);
  const CompositionSampler s(g);
  for (std::int64_t n : {1, 2, 17, 100, 512}) {
    CounterRng a(5, static_cast<std::uint64_t>(n)), b(5, static_cast<std::uint64_t>(n));
    for (int i = 0; i < 400; ++i) CHECK(s.first_part_lazy_inversion(n, a) == s.first_part_full_inversion(n, b));
  }
}

TEST_CASE("sampled compositions follow the exact law") {
  for (const auto& m : {SubordinatorModel::gamma(1.0), SubordinatorModel::ewens_like(2.0), SubordinatorModel::geometric_atoms(),
                        SubordinatorModel::generic_from_csv(data_path("generic_example.csv"))}) {
    CAPTURE(m.name());
    for (std::int64_t table_max : {std::int64_t{512}, std::int64_t{1}}) {  // 1 forces the mixture samplers for n >= 2
      CAPTURE(table_max);
      SamplerOptions opt;
      opt.table_max = table_max;
      const CompositionSampler s(m, opt);
      const std::int64_t n = 6;
      std::map<std::vector<std::int64_t>, int> counts;
      const int reps = 60000;
      CounterRng rng(11, static_cast<std::uint64_t>(table_max));
      for (int i = 0; i < reps; ++i) {
        const auto c = s.sample(n, rng).parts;
        REQUIRE(std::accumulate(c.begin(), c.end(), std::int64_t{0}) == n);
        ++counts[c];
      }
      for (const auto& wc : enumerate_compositions(m, n)) {
        const double p = wc.probability;
        const double se = std::sqrt(p * (1 - p) / reps);
        CHECK(std::abs(counts[wc.parts] / static_cast<double>(reps) - p) < 4.5 * se + 1e-4);
      }
    }
  }
}

TEST_CASE("simulation is independent of the thread count") {
  const auto g = SubordinatorModel::gamma(1.0);
  SimulationOptions one, four;
  four.threads = 4;
  const auto a = simulate(g, 3000, 400, 99, 3, one);
  const auto b = simulate(g, 3000, 400, 99, 3, four);
  CHECK(a.mean_K == b.mean_K);
  CHECK(a.var_K == b.var_K);
  CHECK(a.skewness == b.skewness);
  CHECK(a.ks_statistic == b.ks_statistic);
  CHECK(a.z_scores == b.z_scores);
  CHECK(a.small_part_cov == b.small_part_cov);
  CHECK(a.weight_identity_violations == 0);
  CHECK_THROWS(simulate(g, 10, 99, 1, 1));
}

TEST_CASE("simulated mean against the exact mean") {
  const auto g = SubordinatorModel::ewens_like(1.5);
  const auto t = moments_all_parts(g, 2000);
  const auto s = simulate(g, 2000, 20000, 3, 2);
  CHECK(std::abs(s.mean_K - t.mean[2000]) < 4 * std::sqrt(s.var_K / 20000));
  CHECK(s.min_K >= 1);
  CHECK(s.max_K <= 2000);
}

TEST_CASE("KS statistic") {
  const int N = 1000;
  const boost::math::normal_distribution<> nd;
  std::vector<double> q(N);
  for (int i = 0; i < N; ++i) q[static_cast<std::size_t>(i)] = boost::math::quantile(nd, (i + 0.5) / N);
  CHECK(ks_statistic(q) <= 1.0 / (2 * N) + 1e-6);
  CHECK(ks_statistic(std::vector<double>(100, 0.3)) >= 0.5);
  std::vector<double> shifted(10000);
  for (int i = 0; i < 10000; ++i) shifted[static_cast<std::size_t>(i)] = boost::math::quantile(nd, (i + 0.5) / 10000) + 0.5;
  const double gap = 2 * special::normal_cdf(0.25) - 1;  // sup |Φ(x) − Φ(x − 0.5)|
  CHECK(std::abs(gap - 0.197) < 1e-3);
  CHECK(std::abs(ks_statistic(shifted) - gap) < 0.02);
}
