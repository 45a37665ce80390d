#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "gwforest/offspring.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

/// A closed-form recipe in one variable n, e.g. "ceil(0.5*log2(n)+0.5)".
///
/// Grammar: numbers, n, + - * / ^ (right associative), unary minus,
/// parentheses, and the functions log/ln, log2, log10, sqrt, exp, ceil, floor,
/// round (one argument) and min, max (two arguments). Throws ConfigError on
/// malformed input.
class Expression {
 public:
  static Expression parse(std::string_view text);
  double operator()(double n) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

/// A pattern sequence T_n given as "family:args":
///   chain:<h>        chain of height h (h + 1 nodes)
///   star:<k>         star with k nodes
///   rary:<r>:<h>     complete r-ary tree of height h
///   pmin:<k>         least likely possible tree of size <= k
///   tree:<d0,d1,..>  a fixed tree
/// Integer arguments are expressions in n, rounded to the nearest integer.
class PatternRule {
 public:
  static PatternRule parse(std::string_view text);
  PlaneTree operator()(double n, const OffspringDistribution& dist) const;
  const std::string& text() const noexcept { return text_; }

 private:
  enum class Family { chain, star, rary, pmin, fixed };
  std::string text_;
  Family family_ = Family::fixed;
  Expression r_;
  Expression size_;
  PlaneTree fixed_;
};

/// Rounds an expression value to a non-negative integer; throws ConfigError
/// when it is negative, non-finite or too large.
std::uint64_t as_count(double value, std::string_view what);

}  // namespace gwforest
