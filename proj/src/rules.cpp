#include "gwforest/rules.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "gwforest/exact.hpp"

namespace gwforest {

struct Expression::Node {
  enum class Kind { number, variable, unary_minus, binary, call } kind;
  double value = 0.0;
  char op = 0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression \"" + std::string(s_) + "\": " + why + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto node = std::make_shared<Expression::Node>();
    node->kind = Kind::binary;
    node->op = op;
    node->args = {std::move(a), std::move(b)};
    return node;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    while (true) {
      if (eat('+')) {
        lhs = binary('+', lhs, product());
      } else if (eat('-')) {
        lhs = binary('-', lhs, product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*')) {
        lhs = binary('*', lhs, unary());
      } else if (eat('/')) {
        lhs = binary('/', lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (eat('-')) {
      auto node = std::make_shared<Expression::Node>();
      node->kind = Kind::unary_minus;
      node->args = {unary()};
      return node;
    }
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto node = std::make_shared<Expression::Node>();
      node->kind = Kind::number;
      node->value = v;
      return node;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      auto node = std::make_shared<Expression::Node>();
      if (name == "n") {
        node->kind = Kind::variable;
        return node;
      }
      const std::size_t arity = (name == "min" || name == "max") ? 2
                                : (name == "log" || name == "ln" || name == "log2" || name == "log10" ||
                                   name == "sqrt" || name == "exp" || name == "ceil" || name == "floor" ||
                                   name == "round")
                                    ? 1
                                    : 0;
      if (arity == 0) fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      node->kind = Kind::call;
      node->name = std::move(name);
      node->args.push_back(sum());
      for (std::size_t i = 1; i < arity; ++i) {
        if (!eat(',')) fail("expected ','");
        node->args.push_back(sum());
      }
      if (!eat(')')) fail("expected ')'");
      return node;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& node, double n) {
  switch (node.kind) {
    case Kind::number:
      return node.value;
    case Kind::variable:
      return n;
    case Kind::unary_minus:
      return -eval(*node.args[0], n);
    case Kind::binary: {
      const double a = eval(*node.args[0], n), b = eval(*node.args[1], n);
      switch (node.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case Kind::call: {
      const double a = eval(*node.args[0], n);
      const std::string& f = node.name;
      if (f == "log" || f == "ln") return std::log(a);
      if (f == "log2") return std::log2(a);
      if (f == "log10") return std::log10(a);
      if (f == "sqrt") return std::sqrt(a);
      if (f == "exp") return std::exp(a);
      if (f == "ceil") return std::ceil(a);
      if (f == "floor") return std::floor(a);
      if (f == "round") return std::round(a);
      const double b = eval(*node.args[1], n);
      return f == "min" ? std::min(a, b) : std::max(a, b);
    }
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::operator()(double n) const {
  if (!root_) throw ConfigError("empty expression");
  return eval(*root_, n);
}

std::uint64_t as_count(double value, std::string_view what) {
  if (!std::isfinite(value) || value < -0.5 || value > 1e15) {
    throw ConfigError(std::string(what) + " evaluated to " + std::to_string(value));
  }
  return static_cast<std::uint64_t>(std::llround(value));
}

PatternRule PatternRule::parse(std::string_view text) {
  PatternRule rule;
  rule.text_ = std::string(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("pattern rule \"" + rule.text_ + "\" needs family:args");
  const std::string_view family = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  if (family == "chain") {
    rule.family_ = Family::chain;
    rule.size_ = Expression::parse(args);
  } else if (family == "star") {
    rule.family_ = Family::star;
    rule.size_ = Expression::parse(args);
  } else if (family == "pmin") {
    rule.family_ = Family::pmin;
    rule.size_ = Expression::parse(args);
  } else if (family == "rary") {
    const auto second = args.find(':');
    if (second == std::string_view::npos) throw ConfigError("rary rule needs rary:<r>:<h>");
    rule.family_ = Family::rary;
    rule.r_ = Expression::parse(args.substr(0, second));
    rule.size_ = Expression::parse(args.substr(second + 1));
  } else if (family == "tree") {
    rule.family_ = Family::fixed;
    try {
      rule.fixed_ = PlaneTree::parse(args);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("pattern rule: ") + e.what());
    }
  } else {
    throw ConfigError("unknown pattern family \"" + std::string(family) + "\"");
  }
  return rule;
}

PlaneTree PatternRule::operator()(double n, const OffspringDistribution& dist) const {
  switch (family_) {
    case Family::fixed:
      return fixed_;
    case Family::chain:
      return chain(static_cast<std::uint32_t>(as_count(size_(n), "chain height")));
    case Family::star: {
      const auto k = as_count(size_(n), "star size");
      if (k < 2) throw ConfigError("star size must be >= 2");
      return star(k);
    }
    case Family::rary: {
      const auto r = as_count(r_(n), "arity");
      if (r < 1) throw ConfigError("rary: r must be >= 1");
      return complete_r_ary(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(as_count(size_(n), "height")));
    }
    case Family::pmin: {
      const auto k = as_count(size_(n), "pmin size");
      if (k < 1 || k > kPminCap) throw ConfigError("pmin size out of range");
      return pmin(dist, k).tree;
    }
  }
  return fixed_;
}

}  // namespace gwforest
