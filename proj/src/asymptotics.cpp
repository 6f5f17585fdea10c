#include "regcomp/asymptotics.hpp"

#include <cmath>

#include "regcomp/errors.hpp"
#include "regcomp/special_functions.hpp"

namespace regcomp {

double ExpansionCoefficients::evaluate(double L) const {
  double s = 0.0;
  for (const auto& [k, a] : powers) s += a * std::pow(L, k);
  return s;
}

ExpansionCoefficients mean_expansion(const SubordinatorModel& model) {
  const double m1 = model.log_moment(1), m2 = model.log_moment(2);
  ExpansionCoefficients e;
  e.powers[2] = 1.0 / (2.0 * m1);
  e.powers[1] = m2 / (2.0 * m1 * m1) + model.c() / m1;
  e.remainder_order = "O(1)";
  return e;
}

double variance_leading(const SubordinatorModel& model) {
  const double m1 = model.log_moment(1);
  return model.log_moment(2) / (3.0 * m1 * m1 * m1);
}

double clt_normalize(const SubordinatorModel& model, std::int64_t n, double k) {
  if (n < 2) throw DomainError("clt_normalize: n must be >= 2");
  const double L = std::log(static_cast<double>(n));
  const double m1 = model.log_moment(1);
  return (k - L * L / (2.0 * m1)) / (std::sqrt(variance_leading(model)) * L * std::sqrt(L));
}

SmallPartExpansion small_part_expansion(const SubordinatorModel& model, std::int64_t r) {
  if (r < 1) throw DomainError("small_part_expansion: r must be >= 1");
  const double m1 = model.log_moment(1), m2 = model.log_moment(2), c = model.c();
  const auto rd = static_cast<double>(r);
  SmallPartExpansion out;
  out.d1 = (2.0 * c * m1 - 2.0 * special::kEulerGamma * m1 + m2 - 2.0 * m1 * special::digamma(rd)) / (2.0 * m1 * m1 * rd);
  out.mean.powers[1] = 1.0 / (m1 * rd);
  out.mean.powers[0] = out.d1;
  out.mean.remainder_order = "O(rho^-eps)";
  out.var_leading = m2 / (rd * rd * m1 * m1 * m1) + 1.0 / (rd * m1);
  return out;
}

Eigen::MatrixXd covariance_prediction(const SubordinatorModel& model, int r_max) {
  if (r_max < 1) throw DomainError("covariance_prediction: r_max must be >= 1");
  const double m1 = model.log_moment(1), m2 = model.log_moment(2);
  Eigen::MatrixXd cov(r_max, r_max);
  for (int i = 1; i <= r_max; ++i)
    for (int j = 1; j <= r_max; ++j)
      cov(i - 1, j - 1) = m2 / (m1 * m1 * m1 * i * j) + (i == j ? 1.0 / (j * m1) : 0.0);
  return cov;
}

CumulativeSmallParts cumulative_small_parts(const SubordinatorModel& model, std::int64_t r) {
  if (r < 1) throw DomainError("cumulative_small_parts: r must be >= 1");
  const double m1 = model.log_moment(1), m2 = model.log_moment(2);
  const double h = special::harmonic(r);
  return {h / m1, m2 * h * h / (m1 * m1 * m1) + h / m1};
}

double oscillation_phi(double u, int k_max) {
  if (k_max < 1) throw DomainError("oscillation_phi: k_max must be >= 1");
  // Reduce to one period so the phase stays exact for large u.
  const double frac = u - std::floor(u);
  double s = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double w = 2.0 * special::kPi * k;
    const auto g = special::complex_gamma({0.0, w});
    s += g.real() * std::cos(w * frac) + g.imag() * std::sin(w * frac);
  }
  return -2.0 * s;
}

double oscillation_truncation_bound(int k_max) {
  // |Γ(it)| = sqrt(π / (t sinh(πt))) decays geometrically, so three times the first omitted term suffices.
  const double t = 2.0 * special::kPi * (k_max + 1);
  return 3.0 * 2.0 * std::sqrt(special::kPi / (t * std::sinh(special::kPi * t)));
}

}  // namespace regcomp
