#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature and fixed Gauss-Legendre
// rules. Header-only so the integrand inlines; works for real and complex values.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace regcomp::quad {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-13;
  int max_intervals = 2000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

}  // namespace detail

/// Integrates f over [a, b], splitting first at the given interior breakpoints.
template <class T = double, class F>
Result<T> integrate(F&& f, double a, double b, std::span<const double> breakpoints = {}, Options opt = {}) {
  Result<T> res;
  if (!(b > a)) return res;
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::gk15<T>(f, cuts[i], cuts[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
  while (err > tolerance() && static_cast<int>(heap.size()) < opt.max_intervals) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of incremental updates.
  T sum{};
  double esum = 0.0;
  res.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  res.value = sum;
  res.error = esum;
  res.converged = esum <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(sum)) * 1.000001;
  return res;
}

/// Geometric breakpoints scale * base^k inside (lo, hi); used to resolve
/// integrands that vary on a logarithmic scale.
inline std::vector<double> geometric_breaks(double lo, double hi, double scale, double base = 4.0) {
  std::vector<double> out;
  if (!(scale > 0.0)) return out;
  // At most eight decades below the scale; the integrands here are smooth there.
  double p = scale;
  for (int k = 0; k < 8 && p / base > lo; ++k) p /= base;
  for (; p < hi; p *= base)
    if (p > lo) out.push_back(p);
  return out;
}

/// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
  static constexpr std::array<double, 8> nodes = {
      -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
      -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
      0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
      0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
  static constexpr std::array<double, 8> weights = {
      0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
      0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
      0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
      0.222381034453374470544355994426241, 0.101228536290376259152531354309962};
};

}  // namespace regcomp::quad
