#pragma once

// Poissonised factorial moments f^{(m)}(ρ) = E N_ρ(N_ρ-1)...(N_ρ-m+1), either
// mixed from exact tables or solved directly from the integral recursions
//   λ f^{(m)}(ρ) + ∫ (f^{(m)}(ρ) - f^{(m)}(ρ(1-x))) ν̃(dx) = m ∫ π(ρx) f^{(m-1)}(ρ(1-x)) ν̃(dx)
// and, for the distribution of N_ρ,
//   ∫ (p_j(ρ) - (1-π(ρx)) p_j(ρ(1-x))) ν̃(dx) = ∫ π(ρx) p_{j-1}(ρ(1-x)) ν̃(dx).

#include <cstdint>
#include <span>
#include <vector>

#include "regcomp/exact_engine.hpp"
#include "regcomp/models.hpp"
#include "regcomp/pattern.hpp"

namespace regcomp {

/// Geometric grid ρ_k = rho_0 · ratio^k, k = 0..count-1.
struct RhoGrid {
  double rho_0 = 1e-3;
  double ratio = 1.05;
  std::int64_t count = 2;

  static RhoGrid make(double rho_0, double ratio, std::int64_t count);
  /// Smallest grid starting at rho_0 whose last point is >= rho_max.
  static RhoGrid spanning(double rho_0, double ratio, double rho_max);

  double at(std::int64_t k) const;
  double step() const;  // log(ratio)
  double max() const { return at(count - 1); }
  /// Index of the grid point closest to ρ in log scale.
  std::int64_t nearest(double rho) const;
};

struct PoissonMomentCurve {
  RhoGrid grid;
  std::vector<double> values;  // f^{(m)}(ρ_k)
  std::vector<double> rhs;     // right side g(ρ_k) of the recursion; NaN at seeded points
  int order = 1;
  PatternSpec pattern = PatternSpec::all();
  double lambda = 0.0;
  bool meander = false;
  double max_residual = 0.0;   // max_k |residual_k| / (1 + |g(ρ_k)|) over the checked points

  /// Cubic Lagrange interpolation in log ρ between grid points.
  double at(double rho) const;
};

struct PoissoniseResult {
  double value = 0.0;
  double truncation_bound = 0.0;
};

/// e^{-ρ} Σ_n ρ^n/n! v_n for a table v_0..v_N, summed over the window ρ ± (12√ρ + 12).
PoissoniseResult poissonise_values(std::span<const double> values, double rho);
/// Poissonised mean E K_n.
double poissonise(const MomentTable& table, double rho);
/// Poissonised second factorial moment E K_n (K_n - 1).
double poissonise_factorial2(const MomentTable& table, double rho);

struct SolverOptions {
  double rho_seed = 1e-2;      // grid points at or below use the exact small-n series
  int seed_terms = 14;
  bool meander = false;        // add λπ(ρ) to the first-order right side
  bool check_residual = true;
  double residual_tol = 1e-6;  // relative to 1 + |g(ρ)|
};

/// Orders 1..max_order on one grid.
std::vector<PoissonMomentCurve> solve_orders(const SubordinatorModel& model, const PatternSpec& pattern,
                                             int max_order, const RhoGrid& grid, double lambda,
                                             const SolverOptions& opt = {});

/// Order m; lower orders are solved along the way.
PoissonMomentCurve solve_recursion(const SubordinatorModel& model, const PatternSpec& pattern, int order,
                                   const RhoGrid& grid, double lambda, const SolverOptions& opt = {});

struct DistributionCurves {
  RhoGrid grid;
  std::vector<std::vector<double>> p;  // p[j][k] = P(N_{ρ_k} = j)
  double max_residual = 0.0;
};

DistributionCurves distribution_recursion(const SubordinatorModel& model, const PatternSpec& pattern,
                                          const RhoGrid& grid, int j_max, const SolverOptions& opt = {});

}  // namespace regcomp
