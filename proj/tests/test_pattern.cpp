#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "regcomp/errors.hpp"
#include "regcomp/pattern.hpp"

using regcomp::PatternSpec;

TEST_CASE("parse and describe") {
  CHECK(PatternSpec::parse("all").is_all());
  CHECK(PatternSpec::parse(" {3} ").is_single());
  CHECK(PatternSpec::parse("{3}").single_value() == 3);
  CHECK(PatternSpec::parse("2..5").description() == "{2..5}");
  CHECK(PatternSpec::parse("{4..}").description() == "{4..}");
  CHECK(PatternSpec::parse("{5,1,3,3}").description() == "{1,3,5}");
  CHECK(PatternSpec::parse("odd").description() == "odd");
  CHECK_THROWS_AS(PatternSpec::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(PatternSpec::parse("{0}"), std::invalid_argument);
  CHECK_THROWS_AS(PatternSpec::parse("5..2"), std::invalid_argument);
  CHECK_THROWS_AS(PatternSpec::parse("x"), std::invalid_argument);
  CHECK_THROWS_AS(PatternSpec::range(0, 3), regcomp::DomainError);
}

TEST_CASE("membership") {
  const auto odd = PatternSpec::odd();
  CHECK(odd.contains(1));
  CHECK_FALSE(odd.contains(4));
  const auto s = PatternSpec::set({2, 7});
  CHECK(s.contains(7));
  CHECK_FALSE(s.contains(3));
  CHECK(PatternSpec::all().contains(1000000));
  CHECK_FALSE(PatternSpec::all().contains(0));
}

TEST_CASE("occurrence probabilities") {
  const double rho = 3.7;
  CHECK(std::abs(PatternSpec::all().occurrence(rho) - (1 - std::exp(-rho))) < 1e-15);
  CHECK(std::abs(PatternSpec::odd().occurrence(rho) - std::exp(-rho) * std::sinh(rho)) < 1e-15);
  CHECK(std::abs(PatternSpec::single(2).occurrence(rho) - std::exp(-rho) * rho * rho / 2) < 1e-15);
  // {2..} = all minus {1}
  const double tail = PatternSpec::range(2, PatternSpec::kUnbounded).occurrence(rho);
  CHECK(std::abs(tail - (1 - std::exp(-rho) - rho * std::exp(-rho))) < 1e-14);
  const double set = PatternSpec::set({1, 2}).occurrence(rho);
  CHECK(std::abs(set - PatternSpec::range(1, 2).occurrence(rho)) < 1e-15);
  CHECK(PatternSpec::all().occurrence(0.0) == 0.0);
  CHECK_THROWS_AS(PatternSpec::all().occurrence(-1.0), regcomp::DomainError);
  // Large ρ: a finite set becomes negligible.
  CHECK(PatternSpec::single(3).occurrence(500.0) < 1e-200);
}
