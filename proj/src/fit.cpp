#include "regcomp/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "regcomp/errors.hpp"

namespace regcomp {

FitResult fit_log_polynomial(std::span<const double> x, std::span<const double> y, int degree, double lo, double hi,
                             const std::map<int, double>& fixed) {
  if (x.size() != y.size()) throw DomainError("fit: x and y differ in length");
  if (degree < 0 || degree > 3) throw DomainError("fit: degree must lie in [0, 3]");
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("fit: window must satisfy 0 < lo < hi");
  for (const auto& [k, v] : fixed)
    if (k < 0 || k > degree) throw DomainError("fit: fixed power outside 0..degree");

  std::vector<int> free_powers;
  for (int k = degree; k >= 0; --k)
    if (!fixed.count(k)) free_powers.push_back(k);

  std::vector<double> Ls, rhs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    const double L = std::log(x[i]);
    double r = y[i];
    for (const auto& [k, v] : fixed) r -= v * std::pow(L, k);
    Ls.push_back(L);
    rhs.push_back(r);
  }
  const auto m = static_cast<Eigen::Index>(Ls.size());
  if (m < 20) throw RangeError("fit: window contains fewer than 20 points");

  const auto p = static_cast<Eigen::Index>(free_powers.size());
  Eigen::MatrixXd A(m, p);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = std::pow(Ls[static_cast<std::size_t>(i)], free_powers[static_cast<std::size_t>(j)]);
  // Unit column norms keep the reported condition number meaningful.
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (scale(j) == 0.0) scale(j) = 1.0;
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();

  FitResult out;
  out.window_lo = lo;
  out.window_hi = hi;
  out.points = m;
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(p);
  if (p > 0) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    const auto& s = svd.singularValues();
    out.condition_number = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
    sol = As.colPivHouseholderQr().solve(b).cwiseQuotient(scale);
  } else {
    out.condition_number = 1.0;
  }
  const Eigen::VectorXd res = b - A * sol;
  out.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(m));

  out.coefficients.assign(static_cast<std::size_t>(degree + 1), 0.0);
  for (const auto& [k, v] : fixed) out.coefficients[static_cast<std::size_t>(degree - k)] = v;
  for (Eigen::Index j = 0; j < p; ++j)
    out.coefficients[static_cast<std::size_t>(degree - free_powers[static_cast<std::size_t>(j)])] = sol(j);
  return out;
}

FitResult fit_log_polynomial(std::span<const double> values, int degree, double lo, double hi,
                             const std::map<int, double>& fixed) {
  if (values.empty() || hi > static_cast<double>(values.size() - 1) + 1e-9)
    throw RangeError("fit: window exceeds the table");
  std::vector<double> x(values.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  return fit_log_polynomial(std::span<const double>(x).subspan(1), values.subspan(1), degree, lo, hi, fixed);
}

FitResult fit_log_polynomial(const PoissonMomentCurve& curve, int degree, double lo, double hi,
                             const std::map<int, double>& fixed) {
  std::vector<double> x(curve.values.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = curve.grid.at(static_cast<std::int64_t>(i));
  return fit_log_polynomial(x, curve.values, degree, lo, hi, fixed);
}

}  // namespace regcomp
