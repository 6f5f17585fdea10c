#pragma once

// A pattern E is a finite or cofinite set of positive part sizes; a gap
// counts towards the pattern statistic when its occupancy lies in E.

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace regcomp {

class PatternSpec {
 public:
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

  /// E = {1, 2, ...}: every part.
  static PatternSpec all();
  /// E = {r}.
  static PatternSpec single(std::int64_t r);
  /// E = {lo, ..., hi}; hi = kUnbounded gives the cofinite set {lo, ...}.
  static PatternSpec range(std::int64_t lo, std::int64_t hi);
  /// E = {1, 3, 5, ...}.
  static PatternSpec odd();
  /// Finite set of positive integers.
  static PatternSpec set(std::vector<std::int64_t> members);
  /// "all", "3", "{3}", "1..5", "{1..5}", "4..", "odd", "{1,3,7}".
  static PatternSpec parse(std::string_view text);

  bool contains(std::int64_t r) const;
  bool is_all() const { return kind_ == Kind::Range && lo_ == 1 && hi_ == kUnbounded; }
  bool is_single() const { return kind_ == Kind::Range && lo_ == hi_; }
  std::int64_t single_value() const { return lo_; }
  std::string description() const;

  /// Poisson mean beyond which π has settled to its limit (0 for E = all,
  /// whose occurrence is monotone); used to place quadrature breakpoints.
  double saturation_scale() const;

  /// π(ρ) = Σ_{r∈E} e^{-ρ} ρ^r / r!, the probability that a Poisson(ρ) count lies in E.
  double occurrence(double rho) const;

 private:
  enum class Kind { Range, Odd, Set };
  Kind kind_ = Kind::Range;
  std::int64_t lo_ = 1;
  std::int64_t hi_ = kUnbounded;
  std::vector<std::int64_t> members_;
};

}  // namespace regcomp
