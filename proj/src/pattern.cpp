#include "regcomp/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "regcomp/errors.hpp"

namespace regcomp {
namespace {

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_int(std::string_view s) {
  const std::string t = strip(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("pattern: expected an integer, got '" + t + "'");
  return v;
}

double log_poisson_term(double rho, std::int64_t k) {
  const auto kd = static_cast<double>(k);
  return -rho + kd * std::log(rho) - std::lgamma(kd + 1.0);
}

// Σ_{k=lo}^{hi} e^{-ρ} ρ^k / k!, summed upward from lo with early exit past the mode.
double poisson_window(double rho, std::int64_t lo, std::int64_t hi) {
  double sum = 0.0;
  double lt = log_poisson_term(rho, lo);
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double t = std::exp(lt);
    sum += t;
    if (static_cast<double>(k) > rho && t <= 1e-18 * sum) break;
    lt += std::log(rho) - std::log(static_cast<double>(k + 1));
  }
  return sum;
}

}  // namespace

PatternSpec PatternSpec::all() { return range(1, kUnbounded); }

PatternSpec PatternSpec::single(std::int64_t r) { return range(r, r); }

PatternSpec PatternSpec::range(std::int64_t lo, std::int64_t hi) {
  if (lo < 1 || hi < lo) throw DomainError("pattern: range must satisfy 1 <= lo <= hi");
  PatternSpec p;
  p.kind_ = Kind::Range;
  p.lo_ = lo;
  p.hi_ = hi;
  return p;
}

PatternSpec PatternSpec::odd() {
  PatternSpec p;
  p.kind_ = Kind::Odd;
  return p;
}

PatternSpec PatternSpec::set(std::vector<std::int64_t> members) {
  if (members.empty()) throw DomainError("pattern: empty set");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.front() < 1) throw DomainError("pattern: members must be positive");
  if (members.size() == 1) return single(members.front());
  PatternSpec p;
  p.kind_ = Kind::Set;
  p.members_ = std::move(members);
  p.lo_ = p.members_.front();
  p.hi_ = p.members_.back();
  return p;
}

PatternSpec PatternSpec::parse(std::string_view text) {
  std::string t = strip(text);
  if (t == "all") return all();
  if (t == "odd") return odd();
  if (t.size() >= 2 && t.front() == '{' && t.back() == '}') t = strip(std::string_view(t).substr(1, t.size() - 2));
  if (t.empty()) throw std::invalid_argument("pattern: empty");
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const std::int64_t lo = parse_int(std::string_view(t).substr(0, dots));
    const std::string rest = strip(std::string_view(t).substr(dots + 2));
    const std::int64_t hi = rest.empty() ? kUnbounded : parse_int(rest);
    if (lo < 1 || hi < lo) throw std::invalid_argument("pattern: bad range '" + t + "'");
    return range(lo, hi);
  }
  std::vector<std::int64_t> members;
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto piece = std::string_view(t).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    members.push_back(parse_int(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (auto m : members)
    if (m < 1) throw std::invalid_argument("pattern: members must be positive");
  return set(std::move(members));
}

bool PatternSpec::contains(std::int64_t r) const {
  if (r < 1) return false;
  switch (kind_) {
    case Kind::Range:
      return r >= lo_ && r <= hi_;
    case Kind::Odd:
      return r % 2 == 1;
    case Kind::Set:
      return std::binary_search(members_.begin(), members_.end(), r);
  }
  return false;
}

std::string PatternSpec::description() const {
  switch (kind_) {
    case Kind::Range:
      if (is_all()) return "all";
      if (lo_ == hi_) return "{" + std::to_string(lo_) + "}";
      if (hi_ == kUnbounded) return "{" + std::to_string(lo_) + "..}";
      return "{" + std::to_string(lo_) + ".." + std::to_string(hi_) + "}";
    case Kind::Odd:
      return "odd";
    case Kind::Set: {
      std::string s = "{";
      for (std::size_t i = 0; i < members_.size(); ++i) s += (i ? "," : "") + std::to_string(members_[i]);
      return s + "}";
    }
  }
  return {};
}

double PatternSpec::saturation_scale() const {
  double top = 0.0;
  switch (kind_) {
    case Kind::Range:
      if (is_all()) return 0.0;
      top = static_cast<double>(hi_ == kUnbounded ? lo_ : hi_);
      break;
    case Kind::Odd:
      top = 10.0;
      break;
    case Kind::Set:
      top = static_cast<double>(members_.back());
      break;
  }
  return top + 10.0 * std::sqrt(top) + 10.0;
}

double PatternSpec::occurrence(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("pattern occurrence: rho must be >= 0");
  if (rho == 0.0) return 0.0;
  switch (kind_) {
    case Kind::Odd:
      return -0.5 * std::expm1(-2.0 * rho);
    case Kind::Set: {
      double s = 0.0;
      for (auto r : members_) s += std::exp(log_poisson_term(rho, r));
      return s;
    }
    case Kind::Range:
      if (is_all()) return -std::expm1(-rho);
      if (lo_ == hi_) return std::exp(log_poisson_term(rho, lo_));
      if (hi_ == kUnbounded && static_cast<double>(lo_) <= rho) return 1.0 - poisson_window(rho, 0, lo_ - 1);
      return poisson_window(rho, lo_, hi_);
  }
  return 0.0;
}

}  // namespace regcomp
