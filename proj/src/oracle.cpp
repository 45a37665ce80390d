#include "gwforest/oracle.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gwforest/exact.hpp"

namespace gwforest {
namespace {

struct Node {
  std::vector<std::unique_ptr<Node>> children;
};

std::unique_ptr<Node> build(std::span<const Degree> seq, std::size_t& pos) {
  auto node = std::make_unique<Node>();
  const Degree d = seq[pos++];
  for (Degree c = 0; c < d; ++c) node->children.push_back(build(seq, pos));
  return node;
}

bool same_shape(const Node& a, const Node& b) {
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_shape(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool embeds(const Node& host, const Node& pattern) {
  if (pattern.children.empty()) return true;
  if (host.children.size() != pattern.children.size()) return false;
  for (std::size_t i = 0; i < host.children.size(); ++i) {
    if (!embeds(*host.children[i], *pattern.children[i])) return false;
  }
  return true;
}

std::uint64_t count_at_all(const Node& host, const Node& pattern, CountMode mode) {
  std::uint64_t c = mode == CountMode::fringe ? same_shape(host, pattern) : embeds(host, pattern);
  for (const auto& child : host.children) c += count_at_all(*child, pattern, mode);
  return c;
}

std::unique_ptr<Node> build(const PlaneTree& t) {
  std::size_t pos = 0;
  return build(t.degrees(), pos);
}

}  // namespace

std::uint64_t naive_count(const PlaneTree& host, const PlaneTree& pattern, CountMode mode) {
  return count_at_all(*build(host), *build(pattern), mode);
}

ExactLaw exact_conditional_distribution(const OffspringDistribution& dist, std::size_t n) {
  if (n == 0 || n > kOracleCap) {
    throw ConfigError("oracle: n must lie in [1, " + std::to_string(kOracleCap) + "]");
  }
  ExactLaw law;
  law.n = n;
  for (const auto& t : enumerate_trees(n)) {
    const double w = prob_tree(dist, t);
    if (w > 0.0) {
      law.entries.emplace(tree_key(t), w);
      law.raw_mass += w;
    }
  }
  if (!(law.raw_mass > 0.0)) {
    throw ConfigError("oracle: no tree of size " + std::to_string(n) + " is possible under " + dist.name());
  }
  for (auto& [key, w] : law.entries) w /= law.raw_mass;
  return law;
}

CountLaw exact_count_pmf(const ExactLaw& law, const OffspringDistribution& dist, const PlaneTree& pattern,
                         CountMode mode) {
  CountLaw out;
  const auto pattern_tree = build(pattern);
  for (const auto& [key, w] : law.entries) {
    const PlaneTree host = tree_from_key(key);
    out.pmf[count_at_all(*build(host), *pattern_tree, mode)] += w;
  }
  for (const auto& [c, w] : out.pmf) {
    const double x = static_cast<double>(c);
    out.mean += w * x;
    out.second_factorial += w * x * (x - 1.0);
  }
  out.variance = out.second_factorial + out.mean - out.mean * out.mean;

  const double n = static_cast<double>(law.n);
  out.poisson_mean = n * (mode == CountMode::fringe ? prob_tree(dist, pattern) : prob_nonfringe_root(dist, pattern));
  const auto po = poisson_pmf(out.poisson_mean);
  double diff = 0.0, covered = 0.0;
  for (std::size_t x = 0; x < po.size(); ++x) {
    const auto it = out.pmf.find(x);
    const double q = it == out.pmf.end() ? 0.0 : it->second;
    diff += std::abs(q - po[x]);
    covered += po[x];
  }
  for (const auto& [c, w] : out.pmf) {
    if (c >= po.size()) diff += w;
  }
  diff += std::max(0.0, 1.0 - covered);
  out.tv_to_poisson = std::min(1.0, 0.5 * diff);
  return out;
}

CountLaw exact_count_pmf(const OffspringDistribution& dist, std::size_t n, const PlaneTree& pattern,
                         CountMode mode) {
  return exact_count_pmf(exact_conditional_distribution(dist, n), dist, pattern, mode);
}

}  // namespace gwforest
