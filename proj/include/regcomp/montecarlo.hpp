#pragma once

// Exact sampling of C_n by regeneration: draw the first part from the
// first-part law, then continue with the remaining n - r points.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "regcomp/exact_engine.hpp"
#include "regcomp/models.hpp"

namespace regcomp {

/// Counter-based generator: output k of stream s under seed is a SplitMix64
/// hash of (seed, s, k), so every replicate has its own reproducible stream.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  /// Uniform on the open interval (0, 1).
  double uniform();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct CompositionSample {
  std::vector<std::int64_t> parts;
};

struct SamplerOptions {
  std::int64_t table_max = 512;  // inversion over exact rows up to this n; mixture sampling above
};

class CompositionSampler {
 public:
  explicit CompositionSampler(const SubordinatorModel& model, SamplerOptions opt = {});

  CompositionSample sample(std::int64_t n, CounterRng& rng) const;
  /// First part of C_n.
  std::int64_t first_part(std::int64_t n, CounterRng& rng) const;
  /// Inversion over the full prefix-sum vector; reference for the lazy path (n <= table_max).
  std::int64_t first_part_full_inversion(std::int64_t n, CounterRng& rng) const;
  /// Lazy inversion with prefix sums extended in doubling blocks (n <= table_max).
  std::int64_t first_part_lazy_inversion(std::int64_t n, CounterRng& rng) const;

 private:
  std::int64_t mixture_draw(std::int64_t n, CounterRng& rng) const;
  double mixture_x(std::int64_t n, CounterRng& rng) const;

  const SubordinatorModel& model_;
  SamplerOptions opt_;
  std::shared_ptr<RowCache> rows_;
};

CompositionSample sample_composition(const SubordinatorModel& model, std::int64_t n, CounterRng& rng);

struct SimulationSummary {
  std::int64_t reps = 0;
  std::int64_t n = 0;
  double mean_K = 0.0;
  double var_K = 0.0;
  std::vector<double> small_part_means;  // r = 1..r_max
  Eigen::MatrixXd small_part_cov;
  std::vector<double> z_scores;          // first min(reps, z_keep) replicates
  double ks_statistic = 0.0;             // over all replicates
  double skewness = 0.0;
  std::int64_t min_K = 0, max_K = 0;
  std::int64_t weight_identity_violations = 0;  // replicates with Σ_r r K_{n,r} != n
};

struct SimulationOptions {
  int threads = 1;
  std::int64_t z_keep = 100000;
  SamplerOptions sampler;
};

SimulationSummary simulate(const SubordinatorModel& model, std::int64_t n, std::int64_t reps, std::uint64_t seed,
                           int r_max, const SimulationOptions& opt = {});

/// sup_x |F_N(x) - Φ(x)| against the standard normal CDF.
double ks_statistic(std::vector<double> zs);

}  // namespace regcomp
