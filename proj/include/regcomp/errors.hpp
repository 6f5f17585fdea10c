#pragma once

#include <stdexcept>
#include <string>

namespace regcomp {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a pole (gamma at a nonpositive integer).
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result overflowed the representable range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Numerical procedure did not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Requested index or argument exceeds the range a table or window covers.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A marching scheme produced a non-positive diagonal coefficient.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regcomp
