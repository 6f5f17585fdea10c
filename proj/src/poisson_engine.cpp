#include "regcomp/poisson_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "regcomp/errors.hpp"
#include "regcomp/quadrature.hpp"
#include "regcomp/special_functions.hpp"

namespace regcomp {

// ---------------------------------------------------------------- grid

RhoGrid RhoGrid::make(double rho_0, double ratio, std::int64_t count) {
  if (!(rho_0 > 0.0)) throw DomainError("RhoGrid: rho_0 must be > 0");
  if (!(ratio > 1.0)) throw DomainError("RhoGrid: ratio must be > 1");
  if (count < 2) throw DomainError("RhoGrid: count must be >= 2");
  return RhoGrid{rho_0, ratio, count};
}

RhoGrid RhoGrid::spanning(double rho_0, double ratio, double rho_max) {
  if (!(rho_max > rho_0)) throw DomainError("RhoGrid: rho_max must exceed rho_0");
  const double steps = std::log(rho_max / rho_0) / std::log(ratio);
  return make(rho_0, ratio, static_cast<std::int64_t>(std::ceil(steps - 1e-9)) + 1);
}

double RhoGrid::at(std::int64_t k) const { return rho_0 * std::exp(static_cast<double>(k) * step()); }

double RhoGrid::step() const { return std::log(ratio); }

std::int64_t RhoGrid::nearest(double rho) const {
  const double u = std::log(rho / rho_0) / step();
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(u)), 0, count - 1);
}

namespace {

// Cubic Lagrange basis on the nodes 0, 1, 2, 3.
inline void lagrange4(double t, double l[4]) {
  l[0] = (1.0 - t) * (2.0 - t) * (3.0 - t) / 6.0;
  l[1] = t * (2.0 - t) * (3.0 - t) / 2.0;
  l[2] = t * (t - 1.0) * (3.0 - t) / 2.0;
  l[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
}

// 1 - l[0](t) without cancellation near t = 0.
inline double one_minus_l0(double t) { return t * (11.0 - 6.0 * t + t * t) / 6.0; }

}  // namespace

double PoissonMomentCurve::at(double rho) const {
  if (!(rho >= grid.rho_0 && rho <= grid.max() * (1.0 + 1e-12)))
    throw RangeError("PoissonMomentCurve: rho outside the grid");
  const double u = std::log(rho / grid.rho_0) / grid.step();
  const auto n = static_cast<std::int64_t>(values.size());
  if (n < 4) return values[static_cast<std::size_t>(std::clamp<std::int64_t>(std::llround(u), 0, n - 1))];
  const std::int64_t base = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(u)) - 1, 0, n - 4);
  double l[4];
  lagrange4(u - static_cast<double>(base), l);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += l[i] * values[static_cast<std::size_t>(base + i)];
  return s;
}

// ---------------------------------------------------------------- poissonise

PoissoniseResult poissonise_values(std::span<const double> values, double rho) {
  if (values.empty()) throw DomainError("poissonise: empty table");
  if (!(rho >= 0.0)) throw DomainError("poissonise: rho must be >= 0");
  if (rho == 0.0) return {values[0], 0.0};
  const auto n_max = static_cast<std::int64_t>(values.size()) - 1;
  const double w = 12.0 * std::sqrt(rho) + 12.0;
  const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(rho - w)));
  auto hi = static_cast<std::int64_t>(std::ceil(rho + w));
  if (hi > n_max) {
    if (special::poisson_upper_tail_bound(rho, static_cast<double>(n_max + 1)) > 1e-12)
      throw RangeError("poissonise: Poisson window around rho = " + std::to_string(rho) +
                       " exceeds the table (n_max = " + std::to_string(n_max) + ")");
    hi = n_max;
  }
  const double lr = std::log(rho);
  double sum = 0.0;
  for (std::int64_t n = lo; n <= hi; ++n) {
    const auto nd = static_cast<double>(n);
    sum += std::exp(-rho + nd * lr - std::lgamma(nd + 1.0)) * values[static_cast<std::size_t>(n)];
  }
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  double tail = special::poisson_upper_tail_bound(rho, static_cast<double>(hi + 1));
  if (lo > 0) tail += special::poisson_lower_tail_bound(rho, static_cast<double>(lo - 1));
  return {sum, std::min(tail, 1.0) * vmax};
}

double poissonise(const MomentTable& table, double rho) { return poissonise_values(table.mean, rho).value; }

double poissonise_factorial2(const MomentTable& table, double rho) {
  std::vector<double> f2(table.mean.size());
  for (std::size_t i = 0; i < f2.size(); ++i) f2[i] = table.second_moment[i] - table.mean[i];
  return poissonise_values(f2, rho).value;
}

// ---------------------------------------------------------------- solver

namespace {

// e^{-ρ} Σ_n c_n ρ^n with c_n = a_n / n!.
struct Series {
  std::vector<double> c;
  double operator()(double rho) const {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * rho + c[i];
    return std::exp(-rho) * s;
  }
};

// Law of the pattern count for n points, n = 0..S, with killing at rate λ.
std::vector<std::vector<double>> small_n_law(const SubordinatorModel& model, const PatternSpec& pattern,
                                             double lambda, bool meander, int S) {
  std::vector<std::vector<double>> q(static_cast<std::size_t>(S + 1));
  q[0] = {1.0};
  for (int n = 1; n <= S; ++n) {
    const auto row = model.binomial_row(n);
    const double total = std::accumulate(row.begin(), row.end(), 0.0) + lambda;
    auto& qn = q[static_cast<std::size_t>(n)];
    qn.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (int m = 1; m <= n; ++m) {
      const double p = row[static_cast<std::size_t>(m - 1)] / total;
      const std::size_t shift = pattern.contains(m) ? 1 : 0;
      const auto& prev = q[static_cast<std::size_t>(n - m)];
      for (std::size_t j = 0; j < prev.size(); ++j) qn[j + shift] += p * prev[j];
    }
    if (lambda > 0.0) qn[(meander && pattern.contains(n)) ? 1 : 0] += lambda / total;
  }
  return q;
}

template <class W>
Series series_from_law(const std::vector<std::vector<double>>& q, W weight) {
  Series s;
  double fact = 1.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    double a = 0.0;
    for (std::size_t j = 0; j < q[n].size(); ++j) a += weight(static_cast<int>(j)) * q[n][j];
    s.c.push_back(a / fact);
  }
  return s;
}

double falling(int j, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= static_cast<double>(j - i);
  return r;
}

// A curve known on the grid, continued below ρ_0 by its series.
struct CurveRef {
  const std::vector<double>* values = nullptr;
  const Series* seed = nullptr;
};

// One marching problem
//   λ F(ρ) + ∫ [F(ρ) - (1-κ) F(ρ e^{-y})] ν(dy) = factor ∫ π F_prev(ρ e^{-y}) ν(dy) + extra(ρ)
// with κ = π(ρ(1-e^{-y})) when `kappa` is set and 0 otherwise. F is interpolated
// in u = log ρ by cubics: on the cells y ∈ [0, 2h) through the nodes k..k-3, on
// cell j >= 2 through k-j+1..k-j-2. Beyond u_0 - h the series seed is used.
class Marcher {
 public:
  Marcher(const SubordinatorModel& model, const PatternSpec& pattern, const RhoGrid& grid, double lambda,
          bool kappa, double factor, CurveRef prev, const Series& seed, double meander_lambda,
          const SolverOptions& opt)
      : model_(model), pattern_(pattern), grid_(grid), h_(grid.step()), lambda_(lambda), kappa_(kappa),
        factor_(factor), prev_(prev), seed_(seed), meander_lambda_(meander_lambda), opt_(opt) {
    for (double e = -4.0; e <= 7.0; e += 1.0) z_points_.push_back(std::ldexp(1.0, static_cast<int>(e)));
    const double zs = pattern.saturation_scale();
    for (double z = 2.0; z < zs; z += 2.0) z_points_.push_back(z);
    std::sort(z_points_.begin(), z_points_.end());
    for (int i = 1; i <= 4; ++i) {
      const double r = grid.rho_0 * std::exp(-i * h_);
      virt_[i - 1] = seed_(r);
      virt_prev_[i - 1] = prev_.seed ? (*prev_.seed)(r) : 0.0;
    }
  }

  void run(std::vector<double>& values, std::vector<double>& rhs, double& max_residual) {
    const auto count = grid_.count;
    values.assign(static_cast<std::size_t>(count), 0.0);
    rhs.assign(static_cast<std::size_t>(count), 0.0);
    std::int64_t k0 = 0;
    for (; k0 < count && grid_.at(k0) <= opt_.rho_seed; ++k0) {
      values[static_cast<std::size_t>(k0)] = seed_(grid_.at(k0));
      rhs[static_cast<std::size_t>(k0)] = std::nan("");
    }
    for (std::int64_t k = k0; k < count; ++k) {
      double diag = 0.0, known = 0.0, g = 0.0;
      assemble(values, k, diag, known, g);
      diag += lambda_;
      if (!(diag > 0.0))
        throw StabilityError("poisson solver: non-positive diagonal coefficient at rho = " +
                             std::to_string(grid_.at(k)));
      values[static_cast<std::size_t>(k)] = (g + known) / diag;
      rhs[static_cast<std::size_t>(k)] = g;
    }
    max_residual = 0.0;
    if (!opt_.check_residual) return;
    for (std::int64_t k = std::max<std::int64_t>(k0, 1); k < count; ++k) {
      const double g = rhs[static_cast<std::size_t>(k)];
      const double r = std::abs(residual(values, k, g)) / (1.0 + std::abs(g));
      max_residual = std::max(max_residual, r);
      if (r > opt_.residual_tol)
        throw AccuracyError("poisson solver: integral-equation residual too large at rho = " +
                                std::to_string(grid_.at(k)),
                            r);
    }
  }

 private:
  double node(const std::vector<double>& v, std::int64_t idx) const {
    return idx >= 0 ? v[static_cast<std::size_t>(idx)] : virt_[static_cast<std::size_t>(-idx - 1)];
  }
  double prev_node(std::int64_t idx) const {
    return idx >= 0 ? (*prev_.values)[static_cast<std::size_t>(idx)] : virt_prev_[static_cast<std::size_t>(-idx - 1)];
  }

  std::vector<double> cuts(std::int64_t k) const {
    const double rho = grid_.at(k);
    const double top = static_cast<double>(k + 1) * h_;
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(k + 2) + z_points_.size());
    for (std::int64_t j = 0; j <= k + 1; ++j) c.push_back(static_cast<double>(j) * h_);
    for (double b : model_.y_breakpoints())
      if (b > 0.0 && b < top) c.push_back(b);
    for (double z : z_points_) {
      const double x = z / rho;
      if (x >= 1.0) break;
      const double y = -std::log1p(-x);
      if (y < top) c.push_back(y);
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
  }

  // Adds the contribution of ν-mass w at y < (k+1)h.
  void accumulate(const std::vector<double>& values, std::int64_t k, double rho, double y, double w,
                  double& diag, double& known, double& g) const {
    const double x = -std::expm1(-y);
    const double pi = (kappa_ || prev_.values) ? pattern_.occurrence(rho * x) : 0.0;
    const double kap = kappa_ ? pi : 0.0;
    const double t = y / h_;
    const auto j = static_cast<std::int64_t>(t);
    const std::int64_t b = j <= 1 ? 0 : j - 1;
    double l[4];
    lagrange4(t - static_cast<double>(b), l);
    if (b == 0) {
      diag += w * (one_minus_l0(t) + kap * l[0]);
      known += w * (1.0 - kap) * (l[1] * node(values, k - 1) + l[2] * node(values, k - 2) + l[3] * node(values, k - 3));
    } else {
      diag += w;
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += l[i] * node(values, k - b - i);
      known += w * (1.0 - kap) * s;
    }
    if (prev_.values) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += l[i] * prev_node(k - b - i);
      g += w * factor_ * pi * s;
    }
  }

  void assemble(const std::vector<double>& values, std::int64_t k, double& diag, double& known, double& g) const {
    const double rho = grid_.at(k);
    const double top = static_cast<double>(k + 1) * h_;
    using GL = quad::GaussLegendre8;
    if (model_.has_density()) {
      const auto c = cuts(k);
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double mid = 0.5 * (c[i] + c[i + 1]);
        const double half = 0.5 * (c[i + 1] - c[i]);
        for (int q = 0; q < 8; ++q) {
          const double y = mid + half * GL::nodes[q];
          accumulate(values, k, rho, y, half * GL::weights[q] * model_.y_density(y), diag, known, g);
        }
      }
      // Beyond the grid only the series is needed.
      if (top < model_.y_cutoff()) {
        const auto br = quad::geometric_breaks(top, model_.y_cutoff(), 1.0, 2.0);
        quad::Options o;
        o.rel_tol = 1e-12;
        diag += quad::integrate([&](double y) { return model_.y_density(y); }, top, model_.y_cutoff(), br, o).value;
        known += quad::integrate(
                     [&](double y) {
                       const double kap = kappa_ ? pattern_.occurrence(-rho * std::expm1(-y)) : 0.0;
                       return (1.0 - kap) * seed_(rho * std::exp(-y)) * model_.y_density(y);
                     },
                     top, model_.y_cutoff(), br, o)
                     .value;
        if (prev_.values)
          g += factor_ * quad::integrate(
                             [&](double y) {
                               return pattern_.occurrence(-rho * std::expm1(-y)) * (*prev_.seed)(rho * std::exp(-y)) *
                                      model_.y_density(y);
                             },
                             top, model_.y_cutoff(), br, o)
                             .value;
      }
    }
    for (double y : model_.y_atoms()) {
      if (y < top) {
        accumulate(values, k, rho, y, 1.0, diag, known, g);
        continue;
      }
      const double pi = pattern_.occurrence(-rho * std::expm1(-y));
      const double kap = kappa_ ? pi : 0.0;
      diag += 1.0;
      known += (1.0 - kap) * seed_(rho * std::exp(-y));
      if (prev_.values) g += factor_ * pi * (*prev_.seed)(rho * std::exp(-y));
    }
    if (meander_lambda_ > 0.0) g += meander_lambda_ * pattern_.occurrence(rho);
  }

  // Interpolant of F (or F_prev) at ρ_k e^{-y}, as used by the scheme.
  double interp(const std::vector<double>& values, bool prev, std::int64_t k, double y) const {
    const double top = static_cast<double>(k + 1) * h_;
    if (y >= top) {
      const double r = grid_.at(k) * std::exp(-y);
      return prev ? (*prev_.seed)(r) : seed_(r);
    }
    const double t = y / h_;
    const auto j = static_cast<std::int64_t>(t);
    const std::int64_t b = j <= 1 ? 0 : j - 1;
    double l[4];
    lagrange4(t - static_cast<double>(b), l);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += l[i] * (prev ? prev_node(k - b - i) : node(values, k - b - i));
    return s;
  }

  // Left side minus right side of the equation at ρ_k, by adaptive quadrature.
  double residual(const std::vector<double>& values, std::int64_t k, double g) const {
    const double rho = grid_.at(k);
    const double fk = values[static_cast<std::size_t>(k)];
    auto integrand = [&](double y) {
      const double x = -std::expm1(-y);
      const double pi = (kappa_ || prev_.values) ? pattern_.occurrence(rho * x) : 0.0;
      const double kap = kappa_ ? pi : 0.0;
      double v = y == 0.0 ? 0.0 : fk - (1.0 - kap) * interp(values, false, k, y);
      if (prev_.values) v -= factor_ * pi * interp(values, true, k, y);
      return v;
    };
    auto c = cuts(k);
    quad::Options o;
    o.abs_tol = 1e-3 * opt_.residual_tol * (1.0 + std::abs(g));
    o.rel_tol = 0.0;
    o.max_intervals = 20000;
    const auto res = model_.integrate_nu(integrand, 0.0, c, o);
    double r = lambda_ * fk + res.value;
    if (meander_lambda_ > 0.0) r -= meander_lambda_ * pattern_.occurrence(rho);
    return r;
  }

  const SubordinatorModel& model_;
  const PatternSpec& pattern_;
  RhoGrid grid_;
  double h_;
  double lambda_;
  bool kappa_;
  double factor_;
  CurveRef prev_;
  const Series& seed_;
  double meander_lambda_;
  SolverOptions opt_;
  std::vector<double> z_points_;
  double virt_[4] = {};
  double virt_prev_[4] = {};
};

void check_grid(const RhoGrid& grid, const SolverOptions& opt) {
  if (!(grid.rho_0 > 0.0) || !(grid.ratio > 1.0) || grid.count < 2) throw DomainError("poisson solver: invalid grid");
  if (grid.rho_0 > opt.rho_seed) throw DomainError("poisson solver: grid must start inside the seed region");
  if (opt.seed_terms < 4) throw DomainError("poisson solver: need at least 4 seed terms");
}

}  // namespace

std::vector<PoissonMomentCurve> solve_orders(const SubordinatorModel& model, const PatternSpec& pattern,
                                             int max_order, const RhoGrid& grid, double lambda,
                                             const SolverOptions& opt) {
  if (max_order < 1) throw DomainError("solve_recursion: order must be >= 1");
  if (!(lambda >= 0.0)) throw DomainError("solve_recursion: lambda must be >= 0");
  check_grid(grid, opt);
  const auto law = small_n_law(model, pattern, lambda, opt.meander, opt.seed_terms);
  std::vector<Series> seeds;
  for (int m = 0; m <= max_order; ++m) seeds.push_back(series_from_law(law, [m](int j) { return falling(j, m); }));
  const std::vector<double> ones(static_cast<std::size_t>(grid.count), 1.0);

  std::vector<PoissonMomentCurve> out;
  out.reserve(static_cast<std::size_t>(max_order));
  for (int m = 1; m <= max_order; ++m) {
    PoissonMomentCurve c;
    c.grid = grid;
    c.order = m;
    c.pattern = pattern;
    c.lambda = lambda;
    c.meander = opt.meander;
    const CurveRef prev{m == 1 ? &ones : &out.back().values, &seeds[static_cast<std::size_t>(m - 1)]};
    Marcher mr(model, pattern, grid, lambda, false, static_cast<double>(m), prev, seeds[static_cast<std::size_t>(m)],
               (opt.meander && m == 1) ? lambda : 0.0, opt);
    mr.run(c.values, c.rhs, c.max_residual);
    out.push_back(std::move(c));
  }
  return out;
}

PoissonMomentCurve solve_recursion(const SubordinatorModel& model, const PatternSpec& pattern, int order,
                                   const RhoGrid& grid, double lambda, const SolverOptions& opt) {
  return std::move(solve_orders(model, pattern, order, grid, lambda, opt).back());
}

DistributionCurves distribution_recursion(const SubordinatorModel& model, const PatternSpec& pattern,
                                          const RhoGrid& grid, int j_max, const SolverOptions& opt) {
  if (j_max < 0 || j_max > 50) throw DomainError("distribution_recursion: j_max must lie in [0, 50]");
  check_grid(grid, opt);
  const auto law = small_n_law(model, pattern, 0.0, false, opt.seed_terms);
  std::vector<Series> seeds;
  for (int j = 0; j <= j_max; ++j) seeds.push_back(series_from_law(law, [j](int i) { return i == j ? 1.0 : 0.0; }));

  DistributionCurves out;
  out.grid = grid;
  out.p.resize(static_cast<std::size_t>(j_max + 1));
  std::vector<double> rhs;
  for (int j = 0; j <= j_max; ++j) {
    auto& pj = out.p[static_cast<std::size_t>(j)];
    if (j == 0 && pattern.is_all()) {
      pj.resize(static_cast<std::size_t>(grid.count));
      for (std::int64_t k = 0; k < grid.count; ++k) pj[static_cast<std::size_t>(k)] = std::exp(-grid.at(k));
      continue;
    }
    const CurveRef prev = j == 0 ? CurveRef{} : CurveRef{&out.p[static_cast<std::size_t>(j - 1)],
                                                          &seeds[static_cast<std::size_t>(j - 1)]};
    Marcher mr(model, pattern, grid, 0.0, true, 1.0, prev, seeds[static_cast<std::size_t>(j)], 0.0, opt);
    double res = 0.0;
    mr.run(pj, rhs, res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

}  // namespace regcomp
