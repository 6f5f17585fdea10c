#pragma once

// Subordinator models. Each model is described by its Lévy measure ν on
// (0, ∞) and the image ν̃ of ν under x = 1 - e^{-y}; every engine talks to
// the measure only through this interface.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regcomp/errors.hpp"
#include "regcomp/quadrature.hpp"
#include "regcomp/special_functions.hpp"

namespace regcomp {

using special::ComplexValue;

enum class ModelKind { Gamma, EwensLike, GeometricAtoms, GenericTail };

struct TailKnot {
  double x;
  double tail;
};

struct ConditionReport {
  struct Probe {
    double x;
    double tail;
    double model_prediction;
  };
  bool holds_L = false;
  bool holds_R = false;
  double fitted_c = 0.0;
  double max_residual_L = 0.0;
  double max_residual_R = 0.0;
  std::vector<Probe> probe_points;
};

class SubordinatorModel {
 public:
  static SubordinatorModel gamma(double theta);
  static SubordinatorModel ewens_like(double theta);
  static SubordinatorModel geometric_atoms();
  /// Tail knots (x, ν̃[x,1]) interpolated linearly in log x; a knot (1, 0) is
  /// appended when missing. Below the first knot the tail continues with slope -1 in log x.
  static SubordinatorModel generic_tail(std::vector<TailKnot> knots, double epsilon_L, double epsilon_R);
  /// CSV of "x,tail" rows; "# epsilonL=..." and "# epsilonR=..." comment lines are required.
  static SubordinatorModel generic_from_csv(const std::string& path);
  /// gamma:theta=1.0 | ewens:theta=2.0 | geom | generic:<path>
  static SubordinatorModel parse(std::string_view spec);

  ModelKind kind() const { return kind_; }
  double theta() const { return theta_; }
  std::string name() const;
  double epsilon_L() const { return eps_L_; }
  double epsilon_R() const { return eps_R_; }

  /// Φ(s) = ∫(1 - e^{-sy}) ν(dy).
  ComplexValue laplace_exponent(ComplexValue s) const;
  double laplace_exponent(double s) const;

  /// Φ(n:m) = C(n,m) ∫ x^m (1-x)^{n-m} ν̃(dx), 1 <= m <= n.
  double binomial_moment(std::int64_t n, std::int64_t m) const;
  /// Φ(n:1), ..., Φ(n:n) stored at index m - 1.
  std::vector<double> binomial_row(std::int64_t n) const;

  /// Gamma only: alternating closed form evaluated in multiprecision.
  double gamma_closed_form(std::int64_t n, std::int64_t m) const;
  /// Positive-integrand quadrature in y-space (models with a density).
  double binomial_moment_quadrature(std::int64_t n, std::int64_t m) const;

  /// m_j = ∫ y^j ν(dy), 1 <= j <= 4 (cached).
  double log_moment(int j) const;
  /// Constant of the logarithmic tail condition, ν̃[x,1] = -log x + c - γ + o(1).
  double c() const { return c_; }

  /// Φ̂(ρ) = ∫(1 - e^{-ρx}) ν̃(dx).
  double poisson_laplace(double rho) const;
  /// ν̃[x, 1] for 0 < x <= 1.
  double tail(double x) const;

  ConditionReport check_conditions(int probes) const;

  // y-space view of ν: density part, unit atoms, density breakpoints and a
  // cutoff beyond which the density mass is below 1e-17.
  double y_density(double y) const;
  const std::vector<double>& y_atoms() const { return atoms_; }
  const std::vector<double>& y_breakpoints() const { return breaks_; }
  double y_cutoff() const { return cutoff_; }
  bool has_density() const { return kind_ != ModelKind::GeometricAtoms; }

  /// ∫ f(y) ν(dy); the density part is integrated adaptively over [lo, cutoff]
  /// with the model breakpoints plus `extra`, atoms are summed.
  template <class T = double, class F>
  quad::Result<T> integrate_nu(F&& f, double lo, std::span<const double> extra, quad::Options opt = {}) const;

  /// Generic tail model: ν̃ has density a(x)/x; a is piecewise constant.
  double generic_density_coefficient(double x) const;
  double generic_density_max() const;
  const std::vector<TailKnot>& knots() const { return knots_; }

 private:
  SubordinatorModel() = default;
  void finalize();
  double compute_log_moment(int j) const;
  std::vector<double> generic_row(std::int64_t n) const;
  double generic_entry(std::int64_t n, std::int64_t m) const;
  std::vector<double> geometric_row(std::int64_t n) const;
  double geometric_entry(std::int64_t n, std::int64_t m) const;

  ModelKind kind_ = ModelKind::Gamma;
  double theta_ = 1.0;
  double eps_L_ = 1.0;
  double eps_R_ = 1.0;
  std::string source_;
  std::vector<TailKnot> knots_;
  std::vector<double> slopes_;  // a_i on [x_i, x_{i+1}]
  std::vector<double> atoms_;
  std::vector<double> breaks_;
  double cutoff_ = 0.0;
  std::array<double, 4> m_{};
  double c_ = 0.0;
};

template <class T, class F>
quad::Result<T> SubordinatorModel::integrate_nu(F&& f, double lo, std::span<const double> extra,
                                                quad::Options opt) const {
  quad::Result<T> res;
  res.converged = true;
  if (has_density() && lo < cutoff_) {
    std::vector<double> cuts(breaks_.begin(), breaks_.end());
    cuts.insert(cuts.end(), extra.begin(), extra.end());
    res = quad::integrate<T>([&](double y) { return f(y) * y_density(y); }, lo, cutoff_, cuts, opt);
  }
  for (double y : atoms_)
    if (y >= lo) res.value += f(y);
  return res;
}

}  // namespace regcomp
