#include "gwforest/census.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "gwforest/kernels.hpp"

namespace gwforest {

std::uint64_t count_fringe(const PlaneTree& host, const PlaneTree& pattern) {
  return kernels::count_matches(host.degrees(), pattern.degrees());
}

std::uint64_t count_fringe_kmp(const PlaneTree& host, const PlaneTree& pattern) {
  const auto text = host.degrees();
  const auto pat = pattern.degrees();
  const std::size_t k = pat.size();
  if (k == 0 || k > text.size()) return 0;
  std::vector<std::size_t> failure(k, 0);
  for (std::size_t i = 1, len = 0; i < k;) {
    if (pat[i] == pat[len]) {
      failure[i++] = ++len;
    } else if (len > 0) {
      len = failure[len - 1];
    } else {
      failure[i++] = 0;
    }
  }
  std::uint64_t count = 0;
  for (std::size_t i = 0, j = 0; i < text.size();) {
    if (text[i] == pat[j]) {
      ++i;
      if (++j == k) {
        ++count;
        j = failure[j - 1];
      }
    } else if (j > 0) {
      j = failure[j - 1];
    } else {
      ++i;
    }
  }
  return count;
}

std::uint64_t count_fringe_size(std::span<const std::uint32_t> sizes, std::size_t k) {
  return static_cast<std::uint64_t>(std::count(sizes.begin(), sizes.end(), static_cast<std::uint32_t>(k)));
}

std::uint64_t count_fringe_size(const PlaneTree& host, std::size_t k) {
  return count_fringe_size(subtree_sizes(host.degrees()), k);
}

std::uint64_t count_nonfringe(const PlaneTree& host, std::span<const std::uint32_t> sizes,
                              const PlaneTree& pattern) {
  const auto h = host.degrees();
  const auto p = pattern.degrees();
  const std::size_t n = h.size();
  std::uint64_t count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (p[0] != 0 && h[v] != p[0]) continue;
    std::size_t pos = v;
    bool ok = true;
    for (const Degree d : p) {
      if (d == 0) {
        pos += sizes[pos];
      } else if (h[pos] == d) {
        ++pos;
      } else {
        ok = false;
        break;
      }
    }
    count += ok;
  }
  return count;
}

std::uint64_t count_nonfringe(const PlaneTree& host, const PlaneTree& pattern) {
  return count_nonfringe(host, subtree_sizes(host.degrees()), pattern);
}

std::uint32_t max_r_ary_fringe_height(const PlaneTree& host, std::uint32_t r) {
  if (r == 0) throw std::invalid_argument("max_r_ary_fringe_height: r must be >= 1");
  const auto d = host.degrees();
  // Per node: height of the complete r-ary tree it roots, or -1 if none.
  std::vector<std::int32_t> stack;
  std::int32_t best = 0;
  for (std::size_t i = d.size(); i-- > 0;) {
    std::int32_t value;
    if (d[i] == 0) {
      value = 0;
    } else {
      std::int32_t common = stack.back();
      bool uniform = common >= 0;
      for (Degree c = 0; c < d[i]; ++c) {
        uniform = uniform && stack.back() == common;
        stack.pop_back();
      }
      value = (d[i] == r && uniform) ? common + 1 : -1;
    }
    best = std::max(best, value);
    stack.push_back(value);
  }
  return static_cast<std::uint32_t>(best);
}

std::uint32_t max_r_ary_nonfringe_height(const PlaneTree& host, std::uint32_t r) {
  if (r == 0) throw std::invalid_argument("max_r_ary_nonfringe_height: r must be >= 1");
  const auto d = host.degrees();
  std::vector<std::uint32_t> stack;
  std::uint32_t best = 0;
  for (std::size_t i = d.size(); i-- > 0;) {
    std::uint32_t lowest = std::numeric_limits<std::uint32_t>::max();
    for (Degree c = 0; c < d[i]; ++c) {
      lowest = std::min(lowest, stack.back());
      stack.pop_back();
    }
    const std::uint32_t value = d[i] == r ? lowest + 1 : 0;
    best = std::max(best, value);
    stack.push_back(value);
  }
  return best;
}

KResult compute_K(const PlaneTree& host, const OffspringDistribution& dist, std::size_t k_cap) {
  if (k_cap == 0 || k_cap > kMaxKCap) {
    throw std::length_error("compute_K: k_cap must lie in [1, " + std::to_string(kMaxKCap) + "]");
  }
  const auto d = host.degrees();
  const auto sizes = subtree_sizes(d);
  const TreeKey all = tree_key(d);
  // Keys are byte substrings of `all`; record them as views.
  std::vector<std::size_t> key_offset(d.size() + 1, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    key_offset[i + 1] = key_offset[i] + tree_key(d.subspan(i, 1)).size();
  }
  std::unordered_set<std::string_view> present;
  present.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (sizes[i] <= k_cap) {
      const std::size_t b = key_offset[i], e = key_offset[i + sizes[i]];
      present.emplace(std::string_view(all).substr(b, e - b));
    }
  }

  KResult result;
  const auto allowed = [&dist](Degree deg) { return dist.supports(deg); };
  for (std::size_t k = 1; k <= k_cap; ++k) {
    bool any = false;
    const bool all_present = for_each_tree(k, allowed, [&](std::span<const Degree> s) {
      any = true;
      return present.contains(tree_key(s));
    });
    if (!all_present) return result;
    if (any) result.K = k;
  }
  result.saturated = true;
  return result;
}

CensusReport census(const PlaneTree& host, const OffspringDistribution& dist, const CensusOptions& opts) {
  CensusReport report;
  report.n = host.size();
  const auto sizes = subtree_sizes(host.degrees());
  for (const auto& pattern : opts.patterns) {
    report.fringe_counts[tree_key(pattern)] = count_fringe(host, pattern);
    report.nonfringe_counts[tree_key(pattern)] = count_nonfringe(host, sizes, pattern);
  }
  for (const std::size_t k : opts.sizes) report.size_counts[k] = count_fringe_size(sizes, k);
  for (const std::uint32_t r : opts.r_values) {
    if (!dist.supports(r)) {
      report.r_impossible.push_back(r);
      report.H_r[r] = 0;
      report.H_r_nf[r] = 0;
      continue;
    }
    report.H_r[r] = max_r_ary_fringe_height(host, r);
    report.H_r_nf[r] = max_r_ary_nonfringe_height(host, r);
  }
  if (opts.k_cap > 0) report.K = compute_K(host, dist, opts.k_cap);
  return report;
}

}  // namespace gwforest
