#pragma once

// Closed-form asymptotic predictions in L = log n (or log ρ) built from the
// log-moments m_1, m_2 and the constant c of a model.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

#include "regcomp/models.hpp"

namespace regcomp {

struct ExpansionCoefficients {
  std::map<int, double> powers;  // k -> coefficient of L^k
  std::string remainder_order;

  double coefficient(int k) const {
    const auto it = powers.find(k);
    return it == powers.end() ? 0.0 : it->second;
  }
  double evaluate(double L) const;
};

struct SmallPartExpansion {
  ExpansionCoefficients mean;  // L/(m_1 r) + d_1
  double var_leading = 0.0;    // coefficient of L in var K_{n,r}
  double d1 = 0.0;
};

struct CumulativeSmallParts {
  double mean_leading = 0.0;
  double var_leading = 0.0;
};

/// f^{(1)}(ρ) = L²/(2m_1) + (m_2/(2m_1²) + c/m_1) L + O(1); the constant is not known in closed form.
ExpansionCoefficients mean_expansion(const SubordinatorModel& model);

/// Coefficient of L³ in the variance: m_2 / (3 m_1³).
double variance_leading(const SubordinatorModel& model);

/// (k - L²/(2m_1)) / (sqrt(m_2/(3m_1³)) L^{3/2}), L = log n.
double clt_normalize(const SubordinatorModel& model, std::int64_t n, double k);

SmallPartExpansion small_part_expansion(const SubordinatorModel& model, std::int64_t r);

/// Per-log-n covariance of (K_{n,1}, ..., K_{n,r_max}): m_2/(m_1³ ij) + 1(i=j)/(j m_1).
Eigen::MatrixXd covariance_prediction(const SubordinatorModel& model, int r_max);

/// Leading coefficients for K_{n,1} + ... + K_{n,r}.
CumulativeSmallParts cumulative_small_parts(const SubordinatorModel& model, std::int64_t r);

/// Oscillation of the geometric-atom transform, -2 Σ_{k=1}^{k_max} Re(Γ(2πik) e^{-2πiku}).
double oscillation_phi(double u, int k_max = 5);

/// Bound on the terms of oscillation_phi beyond k_max.
double oscillation_truncation_bound(int k_max);

}  // namespace regcomp
