#pragma once

#include <cstdint>
#include <map>

#include "gwforest/offspring.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

inline constexpr std::size_t kOracleCap = 12;

/// Exact law of the conditioned tree, by brute force.
struct ExactLaw {
  std::size_t n = 0;
  std::map<TreeKey, double> entries;
  /// Sum of pi(T) over the enumerated trees before normalising; equals P(|T| = n).
  double raw_mass = 0.0;
};

/// Enumerates every plane tree of size n, weights it by pi(T) and normalises.
/// Throws ConfigError for n > 12 or when no tree of size n is possible.
ExactLaw exact_conditional_distribution(const OffspringDistribution& dist, std::size_t n);

enum class CountMode { fringe, nonfringe };

struct CountLaw {
  std::map<std::uint64_t, double> pmf;
  double mean = 0.0;
  double variance = 0.0;
  double second_factorial = 0.0;
  /// Poisson reference n pi(T) (fringe) or n pi^nf(T) (non-fringe), and the
  /// exact TV distance from the count law to it.
  double poisson_mean = 0.0;
  double tv_to_poisson = 0.0;
};

CountLaw exact_count_pmf(const OffspringDistribution& dist, std::size_t n, const PlaneTree& pattern,
                         CountMode mode);
CountLaw exact_count_pmf(const ExactLaw& law, const OffspringDistribution& dist, const PlaneTree& pattern,
                         CountMode mode);

/// Counts by an explicit pointer tree and recursive comparison. Shares no code
/// with the census scanners so the two can check each other.
std::uint64_t naive_count(const PlaneTree& host, const PlaneTree& pattern, CountMode mode);

}  // namespace gwforest
