#include "gwforest/sampler.hpp"

#include <random>
#include <string>

#include "gwforest/kernels.hpp"

namespace gwforest {
namespace {

// One attempt of the counts method. Fills `counts` (parallel to the atoms)
// and returns true iff the drawn multiset has degree sum n - 1.
bool draw_counts(const OffspringDistribution& dist, std::span<const double> suffix_mass,
                 std::uint64_t n, Rng& rng, std::vector<std::uint64_t>& counts) {
  const auto atoms = dist.atoms();
  const std::uint64_t target = n - 1;
  std::uint64_t remaining = n;
  std::uint64_t sum = 0;
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t j = 0; j < atoms.size() && remaining > 0; ++j) {
    std::uint64_t c = remaining;
    if (j + 1 < atoms.size()) {
      const double q = std::min(1.0, atoms[j].probability / suffix_mass[j]);
      c = std::binomial_distribution<std::uint64_t>(remaining, q)(rng);
    }
    counts[j] = c;
    sum += c * atoms[j].degree;
    remaining -= c;
    if (sum > target) return false;
    if (remaining > 0 && j + 1 < atoms.size()) {
      // Every remaining node has degree in [next, max].
      const std::uint64_t lo = atoms[j + 1].degree, hi = atoms.back().degree;
      if (sum + remaining * lo > target || sum + remaining * hi < target) return false;
    }
  }
  return sum == target;
}

}  // namespace

PlaneTree sample_conditional(const OffspringDistribution& dist, const SampleConfig& cfg, Rng& rng,
                             SampleStats* stats) {
  const std::uint64_t n = cfg.n;
  if (n == 0) throw ConfigError("sample_conditional: n must be >= 1");
  if ((n - 1) % dist.span() != 0) {
    throw ConfigError("sample_conditional: n = " + std::to_string(n) + " is not 1 mod span " +
                      std::to_string(dist.span()) + " of " + dist.name());
  }
  if (n > (std::uint64_t{1} << 32)) throw ConfigError("sample_conditional: n too large");

  std::vector<Degree> seq;
  std::uint64_t attempts = 0;
  if (cfg.method == DrawMethod::per_element) {
    seq.resize(n);
    while (true) {
      if (attempts >= cfg.max_rejections) break;
      ++attempts;
      for (auto& d : seq) d = dist.sample(rng);
      if (kernels::sum(seq) == n - 1) {
        if (stats) stats->attempts = attempts;
        rotate_to_tree(seq);
        return PlaneTree::from_valid(std::move(seq));
      }
    }
  } else {
    const auto atoms = dist.atoms();
    std::vector<double> suffix(atoms.size());
    double acc = 0.0;
    for (std::size_t j = atoms.size(); j-- > 0;) suffix[j] = (acc += atoms[j].probability);
    std::vector<std::uint64_t> counts(atoms.size());
    while (attempts < cfg.max_rejections) {
      ++attempts;
      if (!draw_counts(dist, suffix, n, rng, counts)) continue;
      seq.clear();
      seq.reserve(n);
      for (std::size_t j = 0; j < atoms.size(); ++j) seq.insert(seq.end(), counts[j], atoms[j].degree);
      // Fisher-Yates: a uniform arrangement of the multiset.
      for (std::size_t i = seq.size(); i > 1; --i) {
        std::swap(seq[i - 1], seq[rng.below(i)]);
      }
      if (stats) stats->attempts = attempts;
      rotate_to_tree(seq);
      return PlaneTree::from_valid(std::move(seq));
    }
  }
  if (stats) stats->attempts = attempts;
  throw SamplerExhausted("sample_conditional: no tree of size " + std::to_string(n) + " after " +
                         std::to_string(attempts) + " attempts");
}

std::optional<PlaneTree> sample_unconditional(const OffspringDistribution& dist, Rng& rng,
                                              std::uint64_t size_cap) {
  if (size_cap == 0) throw ConfigError("sample_unconditional: size_cap must be >= 1");
  std::vector<Degree> seq;
  std::uint64_t open = 1;
  while (open > 0) {
    const Degree d = dist.sample(rng);
    seq.push_back(d);
    open = open + d - 1;
    if (seq.size() + open > size_cap) return std::nullopt;
  }
  return PlaneTree::from_valid(std::move(seq));
}

PlaneTree switch_fringe_at(const PlaneTree& t1, const PlaneTree& t2, std::size_t k, std::size_t z) {
  if (t1.size() != t2.size()) throw std::invalid_argument("switch_fringe: trees differ in size");
  const Span a = subtree_span(t1, z);
  const Span b = subtree_span(t2, z);
  if (a.size() != k || b.size() != k) return t1;
  std::vector<Degree> out(t1.degrees().begin(), t1.degrees().end());
  std::copy(t2.degrees().begin() + static_cast<std::ptrdiff_t>(b.begin),
            t2.degrees().begin() + static_cast<std::ptrdiff_t>(b.end),
            out.begin() + static_cast<std::ptrdiff_t>(a.begin));
  return PlaneTree::from_valid(std::move(out));
}

PlaneTree switch_random_fringe(const PlaneTree& t1, const PlaneTree& t2, std::size_t k, Rng& rng) {
  if (t1.size() != t2.size()) throw std::invalid_argument("switch_fringe: trees differ in size");
  return switch_fringe_at(t1, t2, k, rng.below(t1.size()));
}

}  // namespace gwforest
