#pragma once

// Special-function kernel shared by every model: real and complex gamma,
// digamma/polygamma, log-beta and a few Poisson/normal helpers.

#include <complex>
#include <cstdint>

namespace regcomp::special {

using ComplexValue = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// log Γ(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// Γ(s) on the strip |Re s| <= 10, |Im s| <= 100 (usable beyond it while the
/// result stays finite). Lanczos series (g = 7) with reflection for Re s < 1/2.
/// Throws PoleError at nonpositive integers, OverflowError if the result is not finite.
ComplexValue complex_gamma(ComplexValue s);

/// Principal-branch-free log Γ(s) for Re s >= 1/2 (value mod 2πi).
ComplexValue complex_log_gamma(ComplexValue s);

/// ψ^{(k)}(x) = d^{k+1} log Γ(x) / dx^{k+1} for 0 <= k <= 6 and x > 0.
double polygamma(int k, double x);

inline double digamma(double x) { return polygamma(0, x); }

/// ψ(z) for Re z > 0.
ComplexValue complex_digamma(ComplexValue z);

/// log B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// log Γ(x + a) − log Γ(x + b), accurate when x is large compared with |a − b|.
double log_gamma_ratio(double x, double a, double b);

/// log C(n, m) for 0 <= m <= n.
double log_binomial(std::int64_t n, std::int64_t m);

/// h_n = Σ_{j=1}^{n} 1/j.
double harmonic(std::int64_t n);

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
double expint_e1(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Chernoff bound on P(Poisson(mean) >= k) for k > mean (returns 1 otherwise).
double poisson_upper_tail_bound(double mean, double k);

/// Chernoff bound on P(Poisson(mean) <= k) for k < mean (returns 1 otherwise).
double poisson_lower_tail_bound(double mean, double k);

}  // namespace regcomp::special
