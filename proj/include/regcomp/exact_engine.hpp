#pragma once

// Exact finite-n laws from the regeneration property: after the first part r
// the rest of C_n is distributed as C_{n-r}.

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "regcomp/models.hpp"
#include "regcomp/pattern.hpp"

namespace regcomp {

struct FirstPartLaw {
  std::int64_t n = 0;
  std::vector<double> weights;  // w_{n,r} at index r - 1
};

struct MomentTable {
  std::int64_t n_max = 0;
  std::vector<double> mean;           // [0..n_max]
  std::vector<double> second_moment;  // [0..n_max]
  PatternSpec target = PatternSpec::all();

  double variance(std::int64_t n) const {
    const auto i = static_cast<std::size_t>(n);
    return second_moment[i] - mean[i] * mean[i];
  }
};

struct PartsPMF {
  std::int64_t n = 0;
  std::vector<double> probs;  // P(K_n = k), k = 0..n
};

struct CrossMoments {
  std::int64_t i = 0, j = 0;
  std::vector<double> mean_i, mean_j;  // E K_{n,i}, E K_{n,j}
  std::vector<double> cross;           // E K_{n,i} K_{n,j}
};

/// Serves the rows Φ(n:1..n) for n = 1..n_max in ascending order. The top row
/// is computed directly; lower rows come from the convex descent
///   Φ(n:m) = ((n+1-m) Φ(n+1:m) + (m+1) Φ(n+1:m+1)) / (n+1)
/// with checkpoints every ~√n_max rows, so memory is O(n_max^{3/2}).
class RowStream {
 public:
  RowStream(const SubordinatorModel& model, std::int64_t n_max);
  RowStream(std::vector<double> top_row, std::int64_t n_max);

  /// Row n (index m - 1); n must not decrease between calls.
  std::span<const double> row(std::int64_t n);
  /// Σ_m Φ(n:m) for the row last returned.
  double row_sum() const { return sum_; }
  std::int64_t n_max() const { return n_max_; }

 private:
  void build_checkpoints(std::vector<double> top);
  void load_block(std::int64_t n);

  std::int64_t n_max_;
  std::int64_t block_;
  std::vector<std::vector<double>> checkpoints_;  // rows at n = min(k*block, n_max)
  std::vector<std::vector<double>> rows_;         // current block, rows_[n - block_lo_]
  std::int64_t block_lo_ = 0, block_hi_ = -1;
  std::int64_t last_ = 0;
  double sum_ = 0.0;
};

/// Thread-safe LRU cache of binomial rows with their sequential row sums.
class RowCache {
 public:
  struct Row {
    std::vector<double> phi;  // Φ(n:m) at index m - 1
    double total = 0.0;       // sequential sum of phi
  };

  RowCache(const SubordinatorModel& model, std::size_t budget_bytes = std::size_t{64} << 20);
  std::shared_ptr<const Row> get(std::int64_t n);
  /// Fills rows 1..n_top by descent from a direct top row.
  void prefill(std::int64_t n_top);
  std::size_t bytes() const;

 private:
  void insert_locked(std::int64_t n, std::shared_ptr<const Row> row);

  const SubordinatorModel& model_;
  std::size_t budget_;
  std::size_t used_ = 0;
  mutable std::mutex mu_;
  std::list<std::int64_t> order_;
  std::unordered_map<std::int64_t, std::pair<std::shared_ptr<const Row>, std::list<std::int64_t>::iterator>> map_;
};

FirstPartLaw first_part_law(const SubordinatorModel& model, std::int64_t n);

struct WeightedComposition {
  std::vector<std::int64_t> parts;
  double probability = 0.0;
};
/// All 2^{n-1} compositions of n with their product-form probabilities
/// Π_i Φ(n_i:r_i)/Φ(n_i), n_i the points left before part i (n <= 20).
std::vector<WeightedComposition> enumerate_compositions(const SubordinatorModel& model, std::int64_t n);

struct PmfOptions {
  std::int64_t max_n = 5000;  // triangular storage n^2/2 doubles
};
PartsPMF parts_pmf(const SubordinatorModel& model, std::int64_t n, PmfOptions opt = {});

MomentTable moments_all_parts(const SubordinatorModel& model, std::int64_t n_max);
MomentTable moments_pattern(const SubordinatorModel& model, std::int64_t n_max, const PatternSpec& pattern);
/// Several targets in one pass over the rows.
std::vector<MomentTable> moments_multi(const SubordinatorModel& model, std::int64_t n_max,
                                       const std::vector<PatternSpec>& patterns);

/// E K_{n,i} K_{n,j} for n = 0..n_max.
std::vector<double> cross_moment(const SubordinatorModel& model, std::int64_t n_max, std::int64_t i, std::int64_t j);
CrossMoments cross_moments(const SubordinatorModel& model, std::int64_t n_max, std::int64_t i, std::int64_t j);

}  // namespace regcomp
