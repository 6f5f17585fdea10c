#include "regcomp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "regcomp/asymptotics.hpp"
#include "regcomp/errors.hpp"
#include "regcomp/special_functions.hpp"

namespace regcomp {
namespace {

inline std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// M ~ Bin(n, x) conditioned on M >= 1.
std::int64_t zero_truncated_binomial(std::int64_t n, double x, CounterRng& rng) {
  if (x >= 1.0) return n;
  const auto nd = static_cast<double>(n);
  if (nd * x > 1.0) {
    std::binomial_distribution<std::int64_t> bin(n, x);
    for (;;) {
      const auto m = bin(rng);
      if (m >= 1) return m;
    }
  }
  // Position J of the first success, conditioned on J <= n, then the rest freely.
  const double l1x = std::log1p(-x);
  const double hit = -std::expm1(nd * l1x);  // P(M >= 1)
  const double j = std::floor(std::log1p(-rng.uniform() * hit) / l1x);
  const auto J = std::clamp<std::int64_t>(static_cast<std::int64_t>(j) + 1, 1, n);
  if (J == n) return 1;
  std::binomial_distribution<std::int64_t> bin(n - J, x);
  return 1 + bin(rng);
}

// K ∝ 1/(k + θ) on 0..n-1: propose floor of a continuous 1/(v + θ) law and
// correct by R(a) = 1 / (a log(1 + 1/a)), which decreases in a.
std::int64_t harmonic_index(std::int64_t n, double theta, CounterRng& rng) {
  auto R = [](double a) { return 1.0 / (a * std::log1p(1.0 / a)); };
  const double span = std::log1p(static_cast<double>(n) / theta);
  const double r0 = R(theta);
  for (;;) {
    const double v = theta * std::expm1(rng.uniform() * span);
    const auto k = std::min<std::int64_t>(static_cast<std::int64_t>(v), n - 1);
    if (rng.uniform() * r0 <= R(static_cast<double>(k) + theta)) return k;
  }
}

}  // namespace

// ---------------------------------------------------------------- rng

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed ^ splitmix(stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

double CounterRng::uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

// ---------------------------------------------------------------- sampler

CompositionSampler::CompositionSampler(const SubordinatorModel& model, SamplerOptions opt)
    : model_(model), opt_(opt) {
  if (opt_.table_max < 1) throw DomainError("sampler: table_max must be >= 1");
  const auto tm = static_cast<std::size_t>(opt_.table_max);
  rows_ = std::make_shared<RowCache>(model, std::max<std::size_t>(std::size_t{64} << 20, 8 * tm * (tm + 1)));
  rows_->prefill(opt_.table_max);
}

std::int64_t CompositionSampler::first_part_lazy_inversion(std::int64_t n, CounterRng& rng) const {
  const auto row = rows_->get(n);
  const double target = rng.uniform() * row->total;
  const auto N = static_cast<std::size_t>(n);
  double cum = 0.0;
  std::size_t i = 0;
  for (std::size_t block = 1; i < N; block *= 2) {
    const std::size_t hi = std::min(N, i + block);
    for (; i < hi; ++i) {
      cum += row->phi[i];
      if (cum > target) return static_cast<std::int64_t>(i + 1);
    }
  }
  return n;
}

std::int64_t CompositionSampler::first_part_full_inversion(std::int64_t n, CounterRng& rng) const {
  const auto row = rows_->get(n);
  const double target = rng.uniform() * row->total;
  std::vector<double> prefix(row->phi.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) prefix[i] = (cum += row->phi[i]);
  const auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
  return it == prefix.end() ? n : static_cast<std::int64_t>(it - prefix.begin()) + 1;
}

// X drawn from (1 - (1-x)^n) ν̃(dx) / Φ(n).
double CompositionSampler::mixture_x(std::int64_t n, CounterRng& rng) const {
  const auto nd = static_cast<double>(n);
  switch (model_.kind()) {
    case ModelKind::Gamma: {
      // (1 - e^{-ny})/y = ∫_0^n e^{-ty} dt: T has density ∝ 1/(t + θ), then Y ~ Exp(T + θ).
      const double th = model_.theta();
      const double t = th * std::expm1(rng.uniform() * std::log1p(nd / th));
      const double y = -std::log(rng.uniform()) / (t + th);
      return -std::expm1(-y);
    }
    case ModelKind::EwensLike: {
      // (1 - (1-x)^n)/x = Σ_{k<n} (1-x)^k: K ∝ 1/(k + θ), then 1 - X ~ Beta(k + θ, 1).
      const double a = static_cast<double>(harmonic_index(n, model_.theta(), rng)) + model_.theta();
      return -std::expm1(std::log(rng.uniform()) / a);
    }
    case ModelKind::GeometricAtoms: {
      const auto& ys = model_.y_atoms();
      std::vector<double> w(ys.size());
      double total = 0.0;
      for (std::size_t j = 0; j < ys.size(); ++j) total += (w[j] = -std::expm1(-nd * ys[j]));
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t j = 0; j < ys.size(); ++j)
        if ((cum += w[j]) > target) return -std::expm1(-ys[j]);
      return -std::expm1(-ys.back());
    }
    case ModelKind::GenericTail: {
      // Proposal a ≡ a_max, i.e. the θ = 1 ordered-Ewens mixture; accept with a(x)/a_max.
      const double amax = model_.generic_density_max();
      for (;;) {
        const double a = static_cast<double>(harmonic_index(n, 1.0, rng)) + 1.0;
        const double x = -std::expm1(std::log(rng.uniform()) / a);
        if (x > 0.0 && rng.uniform() * amax <= model_.generic_density_coefficient(x)) return x;
      }
    }
  }
  throw DomainError("sampler: unknown model kind");
}

std::int64_t CompositionSampler::mixture_draw(std::int64_t n, CounterRng& rng) const {
  return zero_truncated_binomial(n, mixture_x(n, rng), rng);
}

std::int64_t CompositionSampler::first_part(std::int64_t n, CounterRng& rng) const {
  if (n < 1) throw DomainError("sampler: n must be >= 1");
  return n <= opt_.table_max ? first_part_lazy_inversion(n, rng) : mixture_draw(n, rng);
}

CompositionSample CompositionSampler::sample(std::int64_t n, CounterRng& rng) const {
  if (n < 1) throw DomainError("sample_composition: n must be >= 1");
  CompositionSample s;
  for (std::int64_t rest = n; rest > 0;) {
    const auto r = first_part(rest, rng);
    s.parts.push_back(r);
    rest -= r;
  }
  return s;
}

CompositionSample sample_composition(const SubordinatorModel& model, std::int64_t n, CounterRng& rng) {
  SamplerOptions opt;
  opt.table_max = std::min<std::int64_t>(opt.table_max, std::max<std::int64_t>(n, 1));
  return CompositionSampler(model, opt).sample(n, rng);
}

// ---------------------------------------------------------------- simulate

namespace {

__extension__ typedef __int128 i128;  // exact sums of squares

struct Accumulator {
  std::int64_t sum_k = 0;
  i128 sum_k2 = 0;
  std::vector<std::int64_t> sum_r;
  std::vector<std::int64_t> sum_rs;  // row-major r_max x r_max
  std::int64_t violations = 0;
};

}  // namespace

SimulationSummary simulate(const SubordinatorModel& model, std::int64_t n, std::int64_t reps, std::uint64_t seed,
                           int r_max, const SimulationOptions& opt) {
  if (n < 1) throw DomainError("simulate: n must be >= 1");
  if (reps < 100) throw DomainError("simulate: reps must be >= 100");
  if (r_max < 1) throw DomainError("simulate: r_max must be >= 1");
  SamplerOptions so = opt.sampler;
  so.table_max = std::min(so.table_max, n);
  const CompositionSampler sampler(model, so);
  const auto R = static_cast<std::size_t>(r_max);
  std::vector<std::int32_t> ks(static_cast<std::size_t>(reps));

  const int threads = std::max(1, opt.threads);
  std::vector<Accumulator> acc(static_cast<std::size_t>(threads));
  auto work = [&](int t) {
    auto& a = acc[static_cast<std::size_t>(t)];
    a.sum_r.assign(R, 0);
    a.sum_rs.assign(R * R, 0);
    std::vector<std::int64_t> counts(R);
    for (std::int64_t i = t; i < reps; i += threads) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      const auto s = sampler.sample(n, rng);
      std::fill(counts.begin(), counts.end(), 0);
      std::int64_t weight = 0;
      for (auto p : s.parts) {
        weight += p;
        if (p <= r_max) ++counts[static_cast<std::size_t>(p - 1)];
      }
      if (weight != n) ++a.violations;
      const auto k = static_cast<std::int64_t>(s.parts.size());
      ks[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(k);
      a.sum_k += k;
      a.sum_k2 += static_cast<i128>(k) * k;
      for (std::size_t r = 0; r < R; ++r) {
        a.sum_r[r] += counts[r];
        for (std::size_t q = 0; q < R; ++q) a.sum_rs[r * R + q] += counts[r] * counts[q];
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  // Integer totals make the merge independent of the thread count.
  Accumulator tot;
  tot.sum_r.assign(R, 0);
  tot.sum_rs.assign(R * R, 0);
  for (const auto& a : acc) {
    tot.sum_k += a.sum_k;
    tot.sum_k2 += a.sum_k2;
    tot.violations += a.violations;
    for (std::size_t i = 0; i < R; ++i) tot.sum_r[i] += a.sum_r[i];
    for (std::size_t i = 0; i < R * R; ++i) tot.sum_rs[i] += a.sum_rs[i];
  }

  SimulationSummary out;
  out.reps = reps;
  out.n = n;
  const auto N = static_cast<double>(reps);
  out.mean_K = static_cast<double>(tot.sum_k) / N;
  const i128 centred = static_cast<i128>(reps) * tot.sum_k2 - static_cast<i128>(tot.sum_k) * tot.sum_k;
  out.var_K = static_cast<double>(centred) / (N * (N - 1.0));
  out.small_part_means.resize(R);
  out.small_part_cov.resize(r_max, r_max);
  for (std::size_t r = 0; r < R; ++r) out.small_part_means[r] = static_cast<double>(tot.sum_r[r]) / N;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t q = 0; q < R; ++q) {
      const i128 c = static_cast<i128>(reps) * tot.sum_rs[r * R + q] -
                         static_cast<i128>(tot.sum_r[r]) * tot.sum_r[q];
      out.small_part_cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = static_cast<double>(c) / (N * (N - 1.0));
    }
  out.weight_identity_violations = tot.violations;
  out.min_K = *std::min_element(ks.begin(), ks.end());
  out.max_K = *std::max_element(ks.begin(), ks.end());

  std::vector<double> z(ks.size());
  if (n >= 2)
    for (std::size_t i = 0; i < ks.size(); ++i) z[i] = clt_normalize(model, n, ks[i]);
  double m3 = 0.0;
  const double sd = std::sqrt(out.var_K);
  for (auto k : ks) {
    const double d = (static_cast<double>(k) - out.mean_K) / (sd > 0.0 ? sd : 1.0);
    m3 += d * d * d;
  }
  out.skewness = sd > 0.0 ? m3 / N : 0.0;
  out.z_scores.assign(z.begin(), z.begin() + std::min<std::int64_t>(reps, opt.z_keep));
  out.ks_statistic = ks.size() >= 20 ? ks_statistic(std::move(z)) : 0.0;
  return out;
}

double ks_statistic(std::vector<double> zs) {
  if (zs.size() < 20) throw DomainError("ks_statistic: need at least 20 values");
  std::sort(zs.begin(), zs.end());
  const auto N = static_cast<double>(zs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double f = special::normal_cdf(zs[i]);
    d = std::max({d, static_cast<double>(i + 1) / N - f, f - static_cast<double>(i) / N});
  }
  return d;
}

}  // namespace regcomp
