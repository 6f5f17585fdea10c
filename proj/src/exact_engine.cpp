#include "regcomp/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "regcomp/errors.hpp"
#include "regcomp/kernels.hpp"

namespace regcomp {

// ---------------------------------------------------------------- RowStream

RowStream::RowStream(const SubordinatorModel& model, std::int64_t n_max) : n_max_(n_max) {
  if (n_max < 1) throw DomainError("RowStream: n_max must be >= 1");
  block_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n_max)))));
  build_checkpoints(model.binomial_row(n_max));
}

RowStream::RowStream(std::vector<double> top_row, std::int64_t n_max) : n_max_(n_max) {
  if (n_max < 1 || static_cast<std::int64_t>(top_row.size()) != n_max)
    throw DomainError("RowStream: top row length must equal n_max");
  block_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n_max)))));
  build_checkpoints(std::move(top_row));
}

void RowStream::build_checkpoints(std::vector<double> top) {
  const auto& k = simd::kernels();
  const std::int64_t count = (n_max_ + block_ - 1) / block_;
  checkpoints_.assign(static_cast<std::size_t>(count), {});
  checkpoints_.back() = top;
  std::vector<double> cur = std::move(top);
  for (std::int64_t n = n_max_ - 1; n >= block_; --n) {
    k.descend_row(cur.data(), cur.data(), static_cast<std::size_t>(n));
    cur.resize(static_cast<std::size_t>(n));
    if (n % block_ == 0) checkpoints_[static_cast<std::size_t>(n / block_ - 1)] = cur;
  }
}

void RowStream::load_block(std::int64_t n) {
  const auto& k = simd::kernels();
  const std::int64_t idx = (n + block_ - 1) / block_;
  const std::int64_t hi = std::min(idx * block_, n_max_);
  const std::int64_t lo = (idx - 1) * block_ + 1;
  rows_.resize(static_cast<std::size_t>(hi - lo + 1));
  std::vector<double> cur = checkpoints_[static_cast<std::size_t>(idx - 1)];
  rows_.back() = cur;
  for (std::int64_t m = hi - 1; m >= lo; --m) {
    k.descend_row(cur.data(), cur.data(), static_cast<std::size_t>(m));
    cur.resize(static_cast<std::size_t>(m));
    rows_[static_cast<std::size_t>(m - lo)] = cur;
  }
  block_lo_ = lo;
  block_hi_ = hi;
}

std::span<const double> RowStream::row(std::int64_t n) {
  if (n < 1 || n > n_max_) throw RangeError("RowStream: row index out of range");
  if (n < last_) throw DomainError("RowStream: rows must be requested in ascending order");
  if (n < block_lo_ || n > block_hi_) load_block(n);
  last_ = n;
  const auto& r = rows_[static_cast<std::size_t>(n - block_lo_)];
  sum_ = simd::kernels().sum(r.data(), r.size());
  return r;
}

// ---------------------------------------------------------------- RowCache

RowCache::RowCache(const SubordinatorModel& model, std::size_t budget_bytes) : model_(model), budget_(budget_bytes) {}

std::size_t RowCache::bytes() const {
  std::lock_guard<std::mutex> lock(mu_);
  return used_;
}

void RowCache::insert_locked(std::int64_t n, std::shared_ptr<const Row> row) {
  if (map_.count(n)) return;
  const std::size_t sz = row->phi.size() * sizeof(double);
  while (!order_.empty() && used_ + sz > budget_) {
    const auto victim = order_.back();
    order_.pop_back();
    used_ -= map_[victim].first->phi.size() * sizeof(double);
    map_.erase(victim);
  }
  order_.push_front(n);
  map_.emplace(n, std::make_pair(std::move(row), order_.begin()));
  used_ += sz;
}

std::shared_ptr<const RowCache::Row> RowCache::get(std::int64_t n) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(n);
    if (it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
  }
  auto row = std::make_shared<Row>();
  row->phi = model_.binomial_row(n);
  row->total = std::accumulate(row->phi.begin(), row->phi.end(), 0.0);
  std::lock_guard<std::mutex> lock(mu_);
  insert_locked(n, row);
  return row;
}

void RowCache::prefill(std::int64_t n_top) {
  if (n_top < 1) return;
  const auto& k = simd::kernels();
  std::vector<double> cur = model_.binomial_row(n_top);
  for (std::int64_t n = n_top;; --n) {
    auto row = std::make_shared<Row>();
    row->phi = cur;
    row->total = std::accumulate(cur.begin(), cur.end(), 0.0);
    {
      std::lock_guard<std::mutex> lock(mu_);
      insert_locked(n, std::move(row));
    }
    if (n == 1) break;
    k.descend_row(cur.data(), cur.data(), static_cast<std::size_t>(n - 1));
    cur.resize(static_cast<std::size_t>(n - 1));
  }
}

// ---------------------------------------------------------------- laws

FirstPartLaw first_part_law(const SubordinatorModel& model, std::int64_t n) {
  if (n < 1) throw DomainError("first_part_law: n must be >= 1");
  FirstPartLaw law;
  law.n = n;
  law.weights = model.binomial_row(n);
  const double total = std::accumulate(law.weights.begin(), law.weights.end(), 0.0);
  for (double& w : law.weights) w /= total;
  return law;
}

std::vector<WeightedComposition> enumerate_compositions(const SubordinatorModel& model, std::int64_t n) {
  if (n < 1 || n > 20) throw DomainError("enumerate_compositions: n must lie in [1, 20]");
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n + 1));
  for (std::int64_t t = 1; t <= n; ++t) {
    w[static_cast<std::size_t>(t)] = model.binomial_row(t);
    const double total = std::accumulate(w[static_cast<std::size_t>(t)].begin(), w[static_cast<std::size_t>(t)].end(), 0.0);
    for (double& x : w[static_cast<std::size_t>(t)]) x /= total;
  }
  std::vector<WeightedComposition> out;
  // Bit i of the mask set means a cut after point i + 1.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    WeightedComposition c;
    c.probability = 1.0;
    std::int64_t start = 0, left = n;
    for (std::int64_t i = 1; i <= n; ++i) {
      if (i == n || (mask >> (i - 1)) & 1U) {
        const std::int64_t r = i - start;
        c.parts.push_back(r);
        c.probability *= w[static_cast<std::size_t>(left)][static_cast<std::size_t>(r - 1)];
        left -= r;
        start = i;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

PartsPMF parts_pmf(const SubordinatorModel& model, std::int64_t n, PmfOptions opt) {
  if (n < 0) throw DomainError("parts_pmf: n must be >= 0");
  if (n > opt.max_n)
    throw RangeError("parts_pmf: n = " + std::to_string(n) + " exceeds the memory cap " + std::to_string(opt.max_n));
  PartsPMF out;
  out.n = n;
  if (n == 0) {
    out.probs = {1.0};
    return out;
  }
  const auto& k = simd::kernels();
  std::vector<std::vector<double>> q(static_cast<std::size_t>(n + 1));
  q[0] = {1.0};
  RowStream rows(model, n);
  for (std::int64_t t = 1; t <= n; ++t) {
    const auto row = rows.row(t);
    const double inv = 1.0 / rows.row_sum();
    auto& qt = q[static_cast<std::size_t>(t)];
    qt.assign(static_cast<std::size_t>(t + 1), 0.0);
    for (std::int64_t r = 1; r <= t; ++r) {
      const auto& prev = q[static_cast<std::size_t>(t - r)];
      k.axpy(row[static_cast<std::size_t>(r - 1)] * inv, prev.data(), qt.data() + 1, prev.size());
    }
  }
  out.probs = std::move(q[static_cast<std::size_t>(n)]);
  return out;
}

// Histories are stored reversed, h[n_max - j] = value at j, so that the
// regeneration sums Σ_r w_r h_{n-r} are contiguous dot products.
std::vector<MomentTable> moments_multi(const SubordinatorModel& model, std::int64_t n_max,
                                       const std::vector<PatternSpec>& patterns) {
  if (n_max < 1) throw DomainError("moments: n_max must be >= 1");
  if (patterns.empty()) return {};
  const auto& k = simd::kernels();
  const std::size_t np = patterns.size();
  const auto N = static_cast<std::size_t>(n_max);
  std::vector<std::vector<double>> hist(2 * np, std::vector<double>(N + 1, 0.0));
  std::vector<MomentTable> out(np);
  for (std::size_t p = 0; p < np; ++p) {
    out[p].n_max = n_max;
    out[p].target = patterns[p];
    out[p].mean.assign(N + 1, 0.0);
    out[p].second_moment.assign(N + 1, 0.0);
  }
  std::vector<const double*> ptrs(2 * np);
  std::vector<double> dots(2 * np);
  RowStream rows(model, n_max);
  for (std::size_t n = 1; n <= N; ++n) {
    const auto row = rows.row(static_cast<std::int64_t>(n));
    const double inv = 1.0 / rows.row_sum();
    for (std::size_t h = 0; h < 2 * np; ++h) ptrs[h] = hist[h].data() + (N - n + 1);
    k.dot_many(row.data(), ptrs.data(), 2 * np, n, dots.data());
    for (std::size_t p = 0; p < np; ++p) {
      const auto& pat = patterns[p];
      const double* e = hist[2 * p].data();
      double w_e = 0.0;     // Σ_{r∈E} w_r
      double mixed = 0.0;   // Σ_{r∈E} w_r e_{n-r}
      if (pat.is_all()) {
        w_e = 1.0;
        mixed = dots[2 * p] * inv;
      } else if (pat.is_single()) {
        const auto r = static_cast<std::size_t>(pat.single_value());
        if (r <= n) {
          w_e = row[r - 1] * inv;
          mixed = w_e * e[N - (n - r)];
        }
      } else {
        for (std::size_t r = 1; r <= n; ++r) {
          if (!pat.contains(static_cast<std::int64_t>(r))) continue;
          w_e += row[r - 1];
          mixed += row[r - 1] * e[N - (n - r)];
        }
        w_e *= inv;
        mixed *= inv;
      }
      const double mean = w_e + dots[2 * p] * inv;
      const double second = w_e + dots[2 * p + 1] * inv + 2.0 * mixed;
      hist[2 * p][N - n] = mean;
      hist[2 * p + 1][N - n] = second;
      out[p].mean[n] = mean;
      out[p].second_moment[n] = second;
    }
  }
  return out;
}

MomentTable moments_all_parts(const SubordinatorModel& model, std::int64_t n_max) {
  return moments_multi(model, n_max, {PatternSpec::all()}).front();
}

MomentTable moments_pattern(const SubordinatorModel& model, std::int64_t n_max, const PatternSpec& pattern) {
  return moments_multi(model, n_max, {pattern}).front();
}

CrossMoments cross_moments(const SubordinatorModel& model, std::int64_t n_max, std::int64_t i, std::int64_t j) {
  if (i < 1 || j < 1) throw DomainError("cross_moment: part sizes must be >= 1");
  if (n_max < 1) throw DomainError("cross_moment: n_max must be >= 1");
  const auto& k = simd::kernels();
  const auto N = static_cast<std::size_t>(n_max);
  const auto ui = static_cast<std::size_t>(i);
  const auto uj = static_cast<std::size_t>(j);
  std::vector<double> ei(N + 1, 0.0), ej(N + 1, 0.0), mm(N + 1, 0.0);  // reversed
  CrossMoments out;
  out.i = i;
  out.j = j;
  out.mean_i.assign(N + 1, 0.0);
  out.mean_j.assign(N + 1, 0.0);
  out.cross.assign(N + 1, 0.0);
  RowStream rows(model, n_max);
  double dots[3];
  for (std::size_t n = 1; n <= N; ++n) {
    const auto row = rows.row(static_cast<std::int64_t>(n));
    const double inv = 1.0 / rows.row_sum();
    const double* ptrs[3] = {ei.data() + (N - n + 1), ej.data() + (N - n + 1), mm.data() + (N - n + 1)};
    k.dot_many(row.data(), ptrs, 3, n, dots);
    const double wi = ui <= n ? row[ui - 1] * inv : 0.0;
    const double wj = uj <= n ? row[uj - 1] * inv : 0.0;
    const double e_i = wi + dots[0] * inv;
    const double e_j = wj + dots[1] * inv;
    double m = dots[2] * inv;
    if (ui <= n) m += wi * ej[N - (n - ui)];
    if (uj <= n) m += wj * ei[N - (n - uj)];
    if (i == j) m += wi;
    ei[N - n] = e_i;
    ej[N - n] = e_j;
    mm[N - n] = m;
    out.mean_i[n] = e_i;
    out.mean_j[n] = e_j;
    out.cross[n] = m;
  }
  return out;
}

std::vector<double> cross_moment(const SubordinatorModel& model, std::int64_t n_max, std::int64_t i, std::int64_t j) {
  return cross_moments(model, n_max, i, j).cross;
}

}  // namespace regcomp
