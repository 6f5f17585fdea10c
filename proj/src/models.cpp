#include "regcomp/models.hpp"

#include <mpfr.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace regcomp {
namespace {

using special::kEulerGamma;

constexpr std::array<double, 8> kBernoulliEven = {1.0 / 6.0,       -1.0 / 30.0,  1.0 / 42.0,      -1.0 / 30.0,
                                                  5.0 / 66.0,      -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};

constexpr int kGammaClosedFormMaxM = 30;
constexpr int kGeometricAtoms = 80;

double log1p_t(double w) { return std::log1p(w); }
ComplexValue log1p_t(ComplexValue w) {
  if (std::abs(w) < 0.1) {
    ComplexValue term = w;
    ComplexValue sum = 0.0;
    for (int k = 1; k < 40; ++k) {
      sum += term / static_cast<double>(k);
      term *= -w;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::log(1.0 + w);
}

double expm1_t(double z) { return std::expm1(z); }
ComplexValue expm1_t(ComplexValue z) {
  if (std::abs(z) < 0.1) {
    ComplexValue term = z;
    ComplexValue sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      sum += term;
      term *= z / static_cast<double>(k);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::exp(z) - 1.0;
}

double magnitude(double v) { return std::abs(v); }
double magnitude(ComplexValue v) { return std::abs(v); }

// Φ(s) = Σ_j (1/(j+θ-1) - 1/(j+θ-1+s)): 32 explicit terms, then the tail
// ψ(z+s) - ψ(z) at z = θ + 32 from the asymptotic series written in a
// cancellation-free form.
template <class T>
T ewens_phi(double theta, T s) {
  constexpr int kTerms = 32;
  T sum = 0.0;
  for (int j = 1; j <= kTerms; ++j) {
    const double a = j + theta - 1.0;
    sum += s / (a * (a + s));
  }
  const double z = theta + kTerms;
  const T lw = log1p_t(s / z);
  T d = lw + 0.5 * s / (z * (z + s));
  double zp = 1.0;
  for (std::size_t k = 0; k < kBernoulliEven.size(); ++k) {
    const double two_k = 2.0 * static_cast<double>(k + 1);
    zp /= z * z;
    d -= kBernoulliEven[k] / two_k * zp * expm1_t(-two_k * lw);
  }
  return sum + d;
}

template <class T>
T geometric_phi(T s) {
  T sum = 0.0;
  const double scale = std::log1p(magnitude(s));
  for (int j = 1; j < 745; ++j) {
    const T term = -expm1_t(s * std::log1p(-std::exp(-static_cast<double>(j))));
    sum += term;
    if (j > scale + 2.0 && magnitude(term) <= 1e-17 * magnitude(sum)) break;
  }
  return sum;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

void require_accuracy(double value, double error, bool converged, double tol, const char* what) {
  if (!converged && error > tol * std::max(1.0, std::abs(value))) throw AccuracyError(what, error);
}

// Upper and lower binomial tails U[m] = P(Bin(n,x) >= m), L[m] = P(Bin(n,x) < m), m = 0..n.
void binomial_tails(std::int64_t n, double x, std::vector<double>& upper, std::vector<double>& lower,
                    const std::vector<double>& log_choose) {
  const auto size = static_cast<std::size_t>(n + 1);
  upper.assign(size + 1, 0.0);
  lower.assign(size + 1, 0.0);
  if (x <= 0.0) {
    std::fill(lower.begin() + 1, lower.end(), 1.0);
    upper[0] = 1.0;
    return;
  }
  if (x >= 1.0) {
    std::fill(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(size), 1.0);
    return;
  }
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  std::vector<double> pmf(size);
  for (std::size_t k = 0; k < size; ++k)
    pmf[k] = std::exp(log_choose[k] + static_cast<double>(k) * lx + static_cast<double>(n - static_cast<std::int64_t>(k)) * l1x);
  for (std::size_t k = size; k-- > 0;) upper[k] = upper[k + 1] + pmf[k];
  for (std::size_t k = 0; k < size; ++k) lower[k + 1] = lower[k] + pmf[k];
}

std::vector<double> log_choose_row(std::int64_t n) {
  std::vector<double> lc(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 0; k <= n; ++k) lc[static_cast<std::size_t>(k)] = special::log_binomial(n, k);
  return lc;
}

}  // namespace

// ---------------------------------------------------------------- construction

SubordinatorModel SubordinatorModel::gamma(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("gamma model: theta must be positive");
  SubordinatorModel m;
  m.kind_ = ModelKind::Gamma;
  m.theta_ = theta;
  m.finalize();
  return m;
}

SubordinatorModel SubordinatorModel::ewens_like(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("ewens model: theta must be positive");
  SubordinatorModel m;
  m.kind_ = ModelKind::EwensLike;
  m.theta_ = theta;
  m.finalize();
  return m;
}

SubordinatorModel SubordinatorModel::geometric_atoms() {
  SubordinatorModel m;
  m.kind_ = ModelKind::GeometricAtoms;
  m.theta_ = 0.0;
  m.finalize();
  return m;
}

SubordinatorModel SubordinatorModel::generic_tail(std::vector<TailKnot> knots, double epsilon_L, double epsilon_R) {
  if (!(epsilon_L > 0.0) || !(epsilon_R > 0.0)) throw DomainError("generic model: epsilonL and epsilonR must be positive");
  if (knots.empty()) throw DomainError("generic model: no knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (!(k.x > 0.0) || k.x > 1.0) throw DomainError("generic model: knot x must lie in (0, 1]");
    if (!(k.tail >= 0.0) || !std::isfinite(k.tail)) throw DomainError("generic model: tail must be finite and >= 0");
    if (i > 0) {
      if (!(k.x > knots[i - 1].x)) throw DomainError("generic model: knots must be strictly increasing in x");
      if (k.tail > knots[i - 1].tail) throw DomainError("generic model: tail must be nonincreasing");
    }
  }
  if (knots.back().x < 1.0) {
    knots.push_back({1.0, 0.0});
  } else if (knots.back().tail != 0.0) {
    throw DomainError("generic model: tail(1) must be 0 (no mass at x = 1)");
  }
  if (knots.size() < 2) throw DomainError("generic model: need a knot below x = 1");
  SubordinatorModel m;
  m.kind_ = ModelKind::GenericTail;
  m.theta_ = 0.0;
  m.eps_L_ = epsilon_L;
  m.eps_R_ = epsilon_R;
  m.knots_ = std::move(knots);
  m.slopes_.resize(m.knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < m.knots_.size(); ++i) {
    const double dl = std::log(m.knots_[i + 1].x) - std::log(m.knots_[i].x);
    m.slopes_[i] = (m.knots_[i].tail - m.knots_[i + 1].tail) / dl;
  }
  m.finalize();
  return m;
}

SubordinatorModel SubordinatorModel::generic_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open generic tail file: " + path);
  std::vector<TailKnot> knots;
  double eps_l = std::numeric_limits<double>::quiet_NaN();
  double eps_r = eps_l;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      t = trim(std::string_view(t).substr(1));
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(std::string_view(t).substr(0, eq));
      double v = 0.0;
      if (!parse_double(std::string_view(t).substr(eq + 1), v)) continue;
      if (key == "epsilonL") eps_l = v;
      if (key == "epsilonR") eps_r = v;
      continue;
    }
    const auto comma = t.find(',');
    double x = 0.0;
    double tail = 0.0;
    if (comma == std::string::npos || !parse_double(std::string_view(t).substr(0, comma), x) ||
        !parse_double(std::string_view(t).substr(comma + 1), tail)) {
      if (knots.empty()) continue;  // header
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'x,tail'");
    }
    knots.push_back({x, tail});
  }
  if (std::isnan(eps_l) || std::isnan(eps_r))
    throw std::invalid_argument(path + ": missing '# epsilonL=' / '# epsilonR=' declarations");
  auto model = generic_tail(std::move(knots), eps_l, eps_r);
  model.source_ = path;
  return model;
}

SubordinatorModel SubordinatorModel::parse(std::string_view spec) {
  const std::string s = trim(spec);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : s.substr(colon + 1);
  auto theta_of = [&]() {
    const auto eq = rest.find('=');
    double theta = 0.0;
    if (eq == std::string::npos || trim(std::string_view(rest).substr(0, eq)) != "theta" ||
        !parse_double(std::string_view(rest).substr(eq + 1), theta))
      throw std::invalid_argument("model '" + s + "': expected " + head + ":theta=<value>");
    if (!(theta > 0.0)) throw std::invalid_argument("model '" + s + "': theta must be positive");
    return theta;
  };
  if (head == "gamma") return gamma(theta_of());
  if (head == "ewens") return ewens_like(theta_of());
  if (head == "geom" && rest.empty()) return geometric_atoms();
  if (head == "generic" && !rest.empty()) return generic_from_csv(rest);
  throw std::invalid_argument("unknown model '" + s + "' (gamma:theta=, ewens:theta=, geom, generic:<path>)");
}

std::string SubordinatorModel::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case ModelKind::Gamma:
      os << "gamma:theta=" << theta_;
      break;
    case ModelKind::EwensLike:
      os << "ewens:theta=" << theta_;
      break;
    case ModelKind::GeometricAtoms:
      os << "geom";
      break;
    case ModelKind::GenericTail:
      os << "generic:" << (source_.empty() ? "<inline>" : source_);
      break;
  }
  return os.str();
}

void SubordinatorModel::finalize() {
  switch (kind_) {
    case ModelKind::Gamma:
      cutoff_ = (46.0 + std::max(0.0, -std::log(theta_))) / theta_;
      c_ = -std::log(theta_);
      break;
    case ModelKind::EwensLike:
      cutoff_ = (46.0 + std::max(0.0, -std::log(theta_))) / theta_;
      c_ = -special::digamma(theta_);
      break;
    case ModelKind::GeometricAtoms:
      for (int j = 1; j <= kGeometricAtoms; ++j) atoms_.push_back(-std::log1p(-std::exp(-static_cast<double>(j))));
      // (L) fails; the period average of Φ̂(ρ) - log ρ is used as the constant.
      c_ = kEulerGamma - 0.5;
      break;
    case ModelKind::GenericTail: {
      for (std::size_t i = 0; i + 1 < knots_.size(); ++i) breaks_.push_back(-std::log1p(-knots_[i].x));
      cutoff_ = 50.0 + std::log(std::max(1.0, slopes_.back()));
      const auto& k0 = knots_.front();
      c_ = kEulerGamma + k0.tail + std::log(k0.x);
      break;
    }
  }
  for (int j = 1; j <= 4; ++j) m_[static_cast<std::size_t>(j - 1)] = compute_log_moment(j);
}

// ---------------------------------------------------------------- measure view

double SubordinatorModel::generic_density_coefficient(double x) const {
  if (x < knots_.front().x) return 1.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const TailKnot& k) { return v < k.x; });
  const auto idx = static_cast<std::size_t>(it - knots_.begin());
  if (idx >= knots_.size()) return slopes_.back();
  return slopes_[idx - 1];
}

double SubordinatorModel::generic_density_max() const {
  double a = 1.0;
  for (double s : slopes_) a = std::max(a, s);
  return a;
}

double SubordinatorModel::y_density(double y) const {
  if (!(y > 0.0)) return 0.0;
  switch (kind_) {
    case ModelKind::Gamma:
      return std::exp(-theta_ * y) / y;
    case ModelKind::EwensLike:
      return std::exp(-theta_ * y) / -std::expm1(-y);
    case ModelKind::GeometricAtoms:
      return 0.0;
    case ModelKind::GenericTail: {
      const double x = -std::expm1(-y);
      return generic_density_coefficient(x) * std::exp(-y) / x;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- Laplace exponent

ComplexValue SubordinatorModel::laplace_exponent(ComplexValue s) const {
  if (s == ComplexValue(0.0, 0.0)) return 0.0;
  switch (kind_) {
    case ModelKind::Gamma:
      return log1p_t(s / theta_);
    case ModelKind::EwensLike:
      return ewens_phi(theta_, s);
    case ModelKind::GeometricAtoms:
      if (s.real() < 0.0) throw DomainError("laplace_exponent: Re s must be >= 0");
      return geometric_phi(s);
    case ModelKind::GenericTail: {
      if (s.real() < 0.0) throw DomainError("laplace_exponent: Re s must be >= 0");
      const auto br = quad::geometric_breaks(0.0, cutoff_, 1.0 / std::abs(s));
      quad::Options opt;
      opt.rel_tol = 1e-13;
      opt.abs_tol = 1e-13;
      auto r = integrate_nu<ComplexValue>([&](double y) { return -expm1_t(-s * y); }, 0.0, br, opt);
      require_accuracy(std::abs(r.value), r.error, r.converged, 1e-10, "laplace_exponent: quadrature did not converge");
      return r.value;
    }
  }
  return 0.0;
}

double SubordinatorModel::laplace_exponent(double s) const {
  if (s == 0.0) return 0.0;
  switch (kind_) {
    case ModelKind::Gamma:
      return std::log1p(s / theta_);
    case ModelKind::EwensLike:
      return ewens_phi(theta_, s);
    case ModelKind::GeometricAtoms:
      if (s < 0.0) throw DomainError("laplace_exponent: s must be >= 0");
      return geometric_phi(s);
    case ModelKind::GenericTail: {
      if (s < 0.0) throw DomainError("laplace_exponent: s must be >= 0");
      const auto br = quad::geometric_breaks(0.0, cutoff_, 1.0 / s);
      quad::Options opt;
      opt.rel_tol = 1e-14;
      auto r = integrate_nu<double>([&](double y) { return -std::expm1(-s * y); }, 0.0, br, opt);
      require_accuracy(r.value, r.error, r.converged, 1e-10, "laplace_exponent: quadrature did not converge");
      return r.value;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- binomial moments

double SubordinatorModel::gamma_closed_form(std::int64_t n, std::int64_t m) const {
  if (kind_ != ModelKind::Gamma) throw DomainError("gamma_closed_form: gamma model only");
  if (m < 1 || m > n) throw DomainError("binomial moment: requires 1 <= m <= n");
  if (m > 200) throw DomainError("gamma_closed_form: m too large for the alternating sum");
  // -C(n,m) Σ_j (-1)^j C(m,j) log(n - m + j + θ); the sum cancels to about
  // m log2(n) bits, so the working precision grows with m.
  const double span = static_cast<double>(n) + theta_ + static_cast<double>(m);
  const auto prec = static_cast<mpfr_prec_t>(80 + m * (static_cast<std::int64_t>(std::ceil(std::log2(span))) + 1));
  mpfr_t acc, term, choose;
  mpfr_inits2(prec, acc, term, choose, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(acc, 0, MPFR_RNDN);
  mpfr_set_ui(choose, 1, MPFR_RNDN);  // C(m, j)
  for (std::int64_t j = 0; j <= m; ++j) {
    mpfr_set_d(term, theta_, MPFR_RNDN);
    mpfr_add_d(term, term, static_cast<double>(n - m + j), MPFR_RNDN);
    mpfr_log(term, term, MPFR_RNDN);
    mpfr_mul(term, term, choose, MPFR_RNDN);
    if (j % 2 == 0)
      mpfr_sub(acc, acc, term, MPFR_RNDN);
    else
      mpfr_add(acc, acc, term, MPFR_RNDN);
    mpfr_mul_ui(choose, choose, static_cast<unsigned long>(m - j), MPFR_RNDN);
    mpfr_div_ui(choose, choose, static_cast<unsigned long>(j + 1), MPFR_RNDN);
  }
  // C(n, m) = Π_{i=1}^{m} (n - m + i) / i
  mpfr_set_ui(choose, 1, MPFR_RNDN);
  for (std::int64_t i = 1; i <= m; ++i) {
    mpfr_mul_d(choose, choose, static_cast<double>(n - m + i), MPFR_RNDN);
    mpfr_div_ui(choose, choose, static_cast<unsigned long>(i), MPFR_RNDN);
  }
  mpfr_mul(acc, acc, choose, MPFR_RNDN);
  const double out = mpfr_get_d(acc, MPFR_RNDN);
  mpfr_clears(acc, term, choose, static_cast<mpfr_ptr>(nullptr));
  return out;
}

double SubordinatorModel::binomial_moment_quadrature(std::int64_t n, std::int64_t m) const {
  if (m < 1 || m > n) throw DomainError("binomial moment: requires 1 <= m <= n");
  if (!has_density()) throw DomainError("binomial_moment_quadrature: model has no density");
  const double md = static_cast<double>(m);
  const double rest = static_cast<double>(n - m);
  const double log_c = special::log_binomial(n, m);
  auto log_density = [&](double y) {
    switch (kind_) {
      case ModelKind::Gamma:
        return -theta_ * y - std::log(y);
      case ModelKind::EwensLike:
        return -theta_ * y - std::log(-std::expm1(-y));
      default: {
        const double x = -std::expm1(-y);
        return std::log(generic_density_coefficient(x)) - y - std::log(x);
      }
    }
  };
  auto g = [&](double y) { return log_c + md * std::log(-std::expm1(-y)) - rest * y + log_density(y); };

  // Coarse peak search in log y around the saddle of x^m (1-x)^{n-m}.
  const double theta_eff = (kind_ == ModelKind::GenericTail) ? 1.0 : theta_;
  const double y0 = std::log1p(md / (rest + theta_eff));
  double y_best = y0;
  double g_best = g(y0);
  for (int k = -24; k <= 24; ++k) {
    const double y = y0 * std::exp2(k / 4.0);
    const double v = g(y);
    if (v > g_best) {
      g_best = v;
      y_best = y;
    }
  }
  const double ey = std::exp(y_best);
  const double curvature = md * ey / ((ey - 1.0) * (ey - 1.0)) + 1.0 / (y_best * y_best);
  const double sigma = 1.0 / std::sqrt(curvature);

  double y_hi = y_best + sigma;
  for (double step = std::max(sigma, y_best); g(y_hi) - g_best > -60.0 && y_hi < 1e4; step *= 2.0) y_hi += step;

  std::vector<double> cuts;
  for (double k : {-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double y = y_best + k * sigma;
    if (y > 0.0 && y < y_hi) cuts.push_back(y);
  }
  for (int k = 1; k <= 12; ++k) cuts.push_back(y_best * std::exp2(-k));
  for (double b : breaks_)
    if (b < y_hi) cuts.push_back(b);

  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.max_intervals = 4000;
  auto r = quad::integrate<double>(
      [&](double y) {
        const double v = g(y) - g_best;
        return v < -745.0 ? 0.0 : std::exp(v);
      },
      0.0, y_hi, cuts, opt);
  require_accuracy(r.value, r.error, r.converged, 1e-10, "binomial_moment: quadrature did not converge");
  return std::exp(g_best) * r.value;
}

double SubordinatorModel::geometric_entry(std::int64_t n, std::int64_t m) const {
  const double log_c = special::log_binomial(n, m);
  const int jmax = std::min(740, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))) + 45);
  double sum = 0.0;
  for (int j = 1; j <= jmax; ++j) {
    const double e = log_c - static_cast<double>(m) * j +
                     static_cast<double>(n - m) * std::log1p(-std::exp(-static_cast<double>(j)));
    sum += std::exp(e);
  }
  return sum;
}

std::vector<double> SubordinatorModel::geometric_row(std::int64_t n) const {
  const auto lc = log_choose_row(n);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  const int jmax = std::min(740, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))) + 45);
  for (int j = 1; j <= jmax; ++j) {
    const double l1x = std::log1p(-std::exp(-static_cast<double>(j)));
    for (std::int64_t m = 1; m <= n; ++m) {
      const double e = lc[static_cast<std::size_t>(m)] - static_cast<double>(m) * j + static_cast<double>(n - m) * l1x;
      if (e > -745.0) row[static_cast<std::size_t>(m - 1)] += std::exp(e);
    }
  }
  return row;
}

// Φ(n:m) = (1/m) Σ_seg a_seg [P(Bin(n, x_hi) >= m) - P(Bin(n, x_lo) >= m)] for
// density a/x on each segment (a = 1 below the first knot).
std::vector<double> SubordinatorModel::generic_row(std::int64_t n) const {
  const auto lc = log_choose_row(n);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  std::vector<double> up_lo, low_lo, up_hi, low_hi;
  binomial_tails(n, 0.0, up_lo, low_lo, lc);
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    binomial_tails(n, knots_[i].x, up_hi, low_hi, lc);
    const double a = (i == 0) ? 1.0 : slopes_[i - 1];
    if (a > 0.0) {
      for (std::int64_t m = 1; m <= n; ++m) {
        const auto k = static_cast<std::size_t>(m);
        const double d = (up_hi[k] <= low_lo[k]) ? up_hi[k] - up_lo[k] : low_lo[k] - low_hi[k];
        row[k - 1] += a * d / static_cast<double>(m);
      }
    }
    std::swap(up_lo, up_hi);
    std::swap(low_lo, low_hi);
  }
  return row;
}

double SubordinatorModel::generic_entry(std::int64_t n, std::int64_t m) const {
  auto tails = [&](double x, double& up, double& low) {
    up = 0.0;
    low = 0.0;
    if (x >= 1.0) {
      up = 1.0;
      return;
    }
    const double lx = std::log(x);
    const double l1x = std::log1p(-x);
    for (std::int64_t k = 0; k <= n; ++k) {
      const double p = std::exp(special::log_binomial(n, k) + static_cast<double>(k) * lx + static_cast<double>(n - k) * l1x);
      (k >= m ? up : low) += p;
    }
  };
  double up_lo = 0.0;
  double low_lo = 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    double up_hi = 0.0;
    double low_hi = 0.0;
    tails(knots_[i].x, up_hi, low_hi);
    const double a = (i == 0) ? 1.0 : slopes_[i - 1];
    const double d = (up_hi <= low_lo) ? up_hi - up_lo : low_lo - low_hi;
    sum += a * d;
    up_lo = up_hi;
    low_lo = low_hi;
  }
  return sum / static_cast<double>(m);
}

double SubordinatorModel::binomial_moment(std::int64_t n, std::int64_t m) const {
  if (m < 1 || m > n) throw DomainError("binomial moment: requires 1 <= m <= n");
  switch (kind_) {
    case ModelKind::Gamma:
      return m <= kGammaClosedFormMaxM ? gamma_closed_form(n, m) : binomial_moment_quadrature(n, m);
    case ModelKind::EwensLike: {
      // C(n,m) B(m, n-m+θ) = (1/m) Γ(n+1)Γ(n-m+θ) / (Γ(n+θ)Γ(n-m+1))
      const double a = special::log_gamma_ratio(static_cast<double>(n), 1.0, theta_);
      const double b = special::log_gamma_ratio(static_cast<double>(n - m), theta_, 1.0);
      return std::exp(a + b) / static_cast<double>(m);
    }
    case ModelKind::GeometricAtoms:
      return geometric_entry(n, m);
    case ModelKind::GenericTail:
      return generic_entry(n, m);
  }
  return 0.0;
}

std::vector<double> SubordinatorModel::binomial_row(std::int64_t n) const {
  if (n < 1) throw DomainError("binomial_row: n must be >= 1");
  switch (kind_) {
    case ModelKind::GeometricAtoms:
      return geometric_row(n);
    case ModelKind::GenericTail:
      return generic_row(n);
    default: {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (std::int64_t m = 1; m <= n; ++m) row[static_cast<std::size_t>(m - 1)] = binomial_moment(n, m);
      return row;
    }
  }
}

// ---------------------------------------------------------------- log-moments, Φ̂, tail

double SubordinatorModel::compute_log_moment(int j) const {
  switch (kind_) {
    case ModelKind::Gamma: {
      double f = 1.0;
      for (int i = 2; i < j; ++i) f *= i;
      return f / std::pow(theta_, j);
    }
    case ModelKind::EwensLike:
      return ((j % 2 == 1) ? 1.0 : -1.0) * special::polygamma(j, theta_);
    case ModelKind::GeometricAtoms: {
      double sum = 0.0;
      for (double y : atoms_) {
        const double term = std::pow(y, j);
        sum += term;
        if (term < 1e-16 * 1e-3) break;
      }
      return sum;
    }
    case ModelKind::GenericTail: {
      quad::Options opt;
      opt.rel_tol = 1e-14;
      auto r = integrate_nu<double>([&](double y) { return std::pow(y, j); }, 0.0, {}, opt);
      require_accuracy(r.value, r.error, r.converged, 1e-10, "log_moment: quadrature did not converge");
      return r.value;
    }
  }
  return 0.0;
}

double SubordinatorModel::log_moment(int j) const {
  if (j < 1 || j > 4) throw DomainError("log_moment: order must lie in [1, 4]");
  return m_[static_cast<std::size_t>(j - 1)];
}

double SubordinatorModel::poisson_laplace(double rho) const {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("poisson_laplace: rho must be >= 0");
  if (rho == 0.0) return 0.0;
  if (kind_ == ModelKind::GeometricAtoms) {
    double sum = 0.0;
    for (int j = 1; j < 2000; ++j) {
      const double a = rho * std::exp(-static_cast<double>(j));
      sum += -std::expm1(-a);
      if (a < 1e-17 * sum) break;
    }
    return sum;
  }
  const auto br = quad::geometric_breaks(0.0, cutoff_, 1.0 / rho);
  quad::Options opt;
  opt.rel_tol = 1e-14;
  auto r = integrate_nu<double>([&](double y) { return -std::expm1(rho * std::expm1(-y)); }, 0.0, br, opt);
  require_accuracy(r.value, r.error, r.converged, 1e-10, "poisson_laplace: quadrature did not converge");
  return r.value;
}

double SubordinatorModel::tail(double x) const {
  if (!(x > 0.0) || x > 1.0) throw DomainError("tail: x must lie in (0, 1]");
  if (x == 1.0) return 0.0;
  const double y = -std::log1p(-x);
  switch (kind_) {
    case ModelKind::Gamma:
      return special::expint_e1(theta_ * y);
    case ModelKind::EwensLike: {
      if (theta_ == 1.0) return -std::log(x);
      if (y >= cutoff_) return 0.0;
      std::vector<double> br;
      for (double p = 2.0 * y; p < cutoff_; p *= 2.0) br.push_back(p);
      quad::Options opt;
      opt.rel_tol = 1e-13;
      auto r = quad::integrate<double>([&](double t) { return y_density(t); }, y, cutoff_, br, opt);
      return r.value;
    }
    case ModelKind::GeometricAtoms: {
      auto k = static_cast<std::int64_t>(std::floor(-std::log(x)));
      while (std::exp(-static_cast<double>(k + 1)) >= x) ++k;
      while (k > 0 && std::exp(-static_cast<double>(k)) < x) --k;
      return static_cast<double>(k);
    }
    case ModelKind::GenericTail: {
      const auto& k0 = knots_.front();
      if (x < k0.x) return k0.tail + std::log(k0.x) - std::log(x);
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const TailKnot& k) { return v < k.x; });
      const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
      if (i + 1 >= knots_.size()) return 0.0;
      return knots_[i].tail - slopes_[i] * (std::log(x) - std::log(knots_[i].x));
    }
  }
  return 0.0;
}

ConditionReport SubordinatorModel::check_conditions(int probes) const {
  if (probes < 8) throw DomainError("check_conditions: need at least 8 probes");
  ConditionReport rep;
  const int half = probes / 2;

  // (L): tail(x) + log x + γ should settle to c at x = 2^{-k}.
  std::vector<double> v;
  for (int k = 0; k < probes; ++k) {
    const double x = std::exp2(-(10 + k));
    const double t = tail(x);
    v.push_back(t + std::log(x) + kEulerGamma);
    rep.probe_points.push_back({x, t, -std::log(x) + c_ - kEulerGamma});
  }
  double mean = 0.0;
  for (int k = half; k < probes; ++k) mean += v[static_cast<std::size_t>(k)];
  mean /= (probes - half);
  double res_l = 0.0;
  for (int k = half; k < probes; ++k) res_l = std::max(res_l, std::abs(v[static_cast<std::size_t>(k)] - mean));
  rep.fitted_c = mean;
  rep.max_residual_L = res_l;
  rep.holds_L = res_l < 1e-3;

  // (R): tail(1 - 2^{-k}) should decay geometrically in y = k log 2.
  std::vector<double> ys, ls;
  bool all_zero = true;
  for (int k = 1 + half; k <= probes; ++k) {
    const double t = tail(1.0 - std::exp2(-k));
    if (t > 0.0) {
      all_zero = false;
      ys.push_back(k * std::log(2.0));
      ls.push_back(std::log(t));
    }
  }
  if (all_zero) {
    rep.holds_R = true;
    rep.max_residual_R = 0.0;
  } else if (ys.size() < 3) {
    rep.holds_R = true;  // eventually zero
  } else {
    const double ny = static_cast<double>(ys.size());
    double sy = 0, sl = 0, syy = 0, syl = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      sy += ys[i];
      sl += ls[i];
      syy += ys[i] * ys[i];
      syl += ys[i] * ls[i];
    }
    const double slope = (ny * syl - sy * sl) / (ny * syy - sy * sy);
    const double icpt = (sl - slope * sy) / ny;
    double res = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) res = std::max(res, std::abs(ls[i] - (icpt + slope * ys[i])));
    rep.max_residual_R = res;
    rep.holds_R = slope < -1e-2 && res < 1.0;
  }
  return rep;
}

}  // namespace regcomp
