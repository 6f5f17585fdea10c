#include <cmath>
#include <functional>
#include <map>

#include "doctest.h"
#include "regcomp/exact_engine.hpp"
#include "regcomp/special_functions.hpp"
#include "test_helpers.hpp"

using namespace regcomp;

namespace {

std::vector<SubordinatorModel> models() {
  return {SubordinatorModel::gamma(1.0), SubordinatorModel::ewens_like(0.6), SubordinatorModel::geometric_atoms(),
          SubordinatorModel::generic_from_csv(data_path("generic_example.csv"))};
}

// Recursive law of K_n written directly from the regeneration rule: k -> probability.
std::map<int, double> k_law(const SubordinatorModel& model, std::int64_t n) {
  std::map<int, double> out;
  std::function<void(std::int64_t, int, double)> go = [&](std::int64_t left, int k, double p) {
    if (left == 0) {
      out[k] += p;
      return;
    }
    const double phi = model.laplace_exponent(static_cast<double>(left));
    for (std::int64_t r = 1; r <= left; ++r) go(left - r, k + 1, p * model.binomial_moment(left, r) / phi);
  };
  go(n, 0, 1.0);
  return out;
}

}  // namespace

TEST_CASE("first-part law") {
  for (const auto& m : models()) CHECK(first_part_law(m, 1).weights == std::vector<double>{1.0});
  const auto w = first_part_law(SubordinatorModel::gamma(1.0), 2).weights;
  CHECK(std::abs(w[0] - 2 * std::log(1.5) / std::log(3.0)) < 1e-14);
  CHECK(std::abs(w[1] - std::log(4.0 / 3.0) / std::log(3.0)) < 1e-14);
  const auto e = first_part_law(SubordinatorModel::ewens_like(1.0), 500).weights;
  const double h = special::harmonic(500);
  for (std::size_t m = 0; m < e.size(); ++m) CHECK(std::abs(e[m] * (m + 1.0) * h - 1.0) < 1e-13);
}

TEST_CASE("composition enumeration against an independent recursion") {
  for (const auto& m : models()) {
    const auto comps = enumerate_compositions(m, 7);
    CHECK(comps.size() == 64);
    std::map<int, double> law;
    double total = 0.0;
    for (const auto& c : comps) {
      law[static_cast<int>(c.parts.size())] += c.probability;
      total += c.probability;
    }
    CHECK(std::abs(total - 1.0) < 1e-13);
    const auto pmf = parts_pmf(m, 7);
    for (const auto& [k, p] : k_law(m, 7)) {
      CHECK(std::abs(law[k] - p) < 1e-13);
      CHECK(std::abs(pmf.probs[static_cast<std::size_t>(k)] - p) < 1e-13);
    }
  }
}

TEST_CASE("moment tables") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto t = moments_all_parts(g, 3000);
  CHECK(t.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.second_moment[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(t.mean[2] - (1 + 2 * std::log(1.5) / std::log(3.0))) < 3e-14);
  const auto pmf = parts_pmf(g, 3000);
  double s = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
    CHECK(pmf.probs[k] >= 0.0);
    s += pmf.probs[k];
    mean += static_cast<double>(k) * pmf.probs[k];
    second += static_cast<double>(k * k) * pmf.probs[k];
  }
  CHECK(pmf.probs[0] == 0.0);
  CHECK(std::abs(s - 1.0) < 1e-12);
  CHECK(std::abs(mean / t.mean[3000] - 1.0) < 1e-11);
  CHECK(std::abs(second / t.second_moment[3000] - 1.0) < 1e-11);

  const auto all = moments_pattern(g, 500, PatternSpec::all());
  const auto ref = moments_all_parts(g, 500);
  for (std::size_t n = 0; n <= 500; ++n) CHECK(std::abs(all.mean[n] - ref.mean[n]) < 1e-12 * (1 + ref.mean[n]));
  const auto big = moments_pattern(g, 40, PatternSpec::single(50));
  for (double v : big.mean) CHECK(v == 0.0);
}

TEST_CASE("small-part ratio and cross moments") {
  const auto g = SubordinatorModel::gamma(1.0);
  const auto tabs = moments_multi(g, 10000, {PatternSpec::single(1), PatternSpec::single(2)});
  CHECK(std::abs(tabs[0].mean[10000] / tabs[1].mean[10000] / 2.0 - 1.0) < 0.15);
  const auto c11 = cross_moment(g, 300, 1, 1);
  for (std::size_t n = 0; n <= 300; ++n) CHECK(std::abs(c11[n] - tabs[0].second_moment[n]) < 1e-11 * (1 + c11[n]));
  const auto c23 = cross_moment(g, 300, 2, 3);
  for (std::size_t n = 0; n < 5; ++n) CHECK(c23[n] == 0.0);
  CHECK(c23[5] > 0.0);
  const auto cm = cross_moments(g, 300, 2, 3);
  CHECK(cm.cross == c23);
}

TEST_CASE("row stream matches direct rows") {
  for (const auto& m : models()) {
    RowStream rows(m, 700);
    for (std::int64_t n = 1; n <= 700; ++n) {
      const auto r = rows.row(n);
      if (n % 97 != 1 && n != 700) continue;
      const auto d = m.binomial_row(n);
      REQUIRE(r.size() == d.size());
      for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(r[i] - d[i]) <= 1e-12 * (d[i] + 1e-3));
    }
  }
}

TEST_CASE("row cache") {
  const auto m = SubordinatorModel::gamma(2.0);
  RowCache cache(m, 1 << 16);
  cache.prefill(300);
  const auto r = cache.get(250);
  CHECK(r->phi.size() == 250);
  CHECK(std::abs(r->total - m.laplace_exponent(250.0)) < 1e-12);
  CHECK(cache.bytes() <= std::size_t{1} << 16);
}
