#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gwforest/offspring.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

/// Number of fringe occurrences of `pattern` in `host`: positions whose
/// subtree equals the pattern. Since preorder degree sequences are prefix
/// free, this is the number of contiguous factors equal to the pattern's
/// degree sequence. Uses the dispatched SIMD scan.
std::uint64_t count_fringe(const PlaneTree& host, const PlaneTree& pattern);

/// Same count through Knuth-Morris-Pratt, O(n + k) regardless of input.
std::uint64_t count_fringe_kmp(const PlaneTree& host, const PlaneTree& pattern);

/// Number of nodes whose fringe subtree has exactly k nodes.
std::uint64_t count_fringe_size(const PlaneTree& host, std::size_t k);
std::uint64_t count_fringe_size(std::span<const std::uint32_t> sizes, std::size_t k);

/// Number of nodes v with pattern embedded at v: internal pattern nodes need
/// the same degree in the host, pattern leaves absorb whole host subtrees.
std::uint64_t count_nonfringe(const PlaneTree& host, const PlaneTree& pattern);
std::uint64_t count_nonfringe(const PlaneTree& host, std::span<const std::uint32_t> sizes,
                              const PlaneTree& pattern);

/// Height of the tallest complete r-ary fringe subtree (0 for a bare leaf).
std::uint32_t max_r_ary_fringe_height(const PlaneTree& host, std::uint32_t r);

/// Height of the tallest complete r-ary non-fringe subtree.
std::uint32_t max_r_ary_nonfringe_height(const PlaneTree& host, std::uint32_t r);

inline constexpr std::size_t kMaxKCap = 16;

struct KResult {
  std::size_t K = 0;
  /// Every attainable size up to k_cap passed, so K is only a lower bound.
  bool saturated = false;
};

/// Largest attainable size k <= k_cap (P(|T| = k) > 0) such that every
/// possible tree of size <= k is a fringe subtree of `host`.
KResult compute_K(const PlaneTree& host, const OffspringDistribution& dist, std::size_t k_cap);

struct CensusOptions {
  std::vector<PlaneTree> patterns;
  std::vector<std::size_t> sizes;  // k values for N_{S_k}
  std::vector<std::uint32_t> r_values;
  std::size_t k_cap = 0;  // 0 skips K
};

struct CensusReport {
  std::size_t n = 0;
  std::map<TreeKey, std::uint64_t> fringe_counts;
  std::map<TreeKey, std::uint64_t> nonfringe_counts;
  std::map<std::size_t, std::uint64_t> size_counts;
  std::map<std::uint32_t, std::uint32_t> H_r;
  std::map<std::uint32_t, std::uint32_t> H_r_nf;
  /// r values with p_r = 0: their heights are reported as 0.
  std::vector<std::uint32_t> r_impossible;
  KResult K;
};

CensusReport census(const PlaneTree& host, const OffspringDistribution& dist, const CensusOptions& opts);

}  // namespace gwforest
