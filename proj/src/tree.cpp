#include "gwforest/tree.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "gwforest/kernels.hpp"

namespace gwforest {

bool validate(std::span<const Degree> degrees) noexcept {
  if (degrees.empty()) return false;
  // open = number of child slots not yet filled after each prefix.
  std::int64_t open = 1;
  const std::size_t k = degrees.size();
  for (std::size_t i = 0; i < k; ++i) {
    open += static_cast<std::int64_t>(degrees[i]) - 1;
    if (i + 1 < k && open < 1) return false;
  }
  return open == 0;
}

PlaneTree::PlaneTree(std::vector<Degree> degrees) : degrees_(std::move(degrees)) {
  if (!validate(degrees_)) {
    throw std::invalid_argument("not a preorder degree sequence: " + to_string());
  }
}

PlaneTree PlaneTree::from_valid(std::vector<Degree> degrees) noexcept {
  PlaneTree t;
  t.degrees_ = std::move(degrees);
  return t;
}

PlaneTree PlaneTree::parse(std::string_view text) {
  std::vector<Degree> degrees;
  const char* p = text.data();
  const char* end = p + text.size();
  auto skip_space = [&] {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n')) ++p;
  };
  skip_space();
  while (p < end) {
    Degree d = 0;
    const auto [next, ec] = std::from_chars(p, end, d);
    if (ec != std::errc{}) {
      throw std::invalid_argument("bad degree sequence '" + std::string(text) + "'");
    }
    degrees.push_back(d);
    p = next;
    skip_space();
    if (p < end) {
      if (*p != ',') throw std::invalid_argument("bad degree sequence '" + std::string(text) + "'");
      ++p;
      skip_space();
    }
  }
  return PlaneTree(std::move(degrees));
}

std::size_t PlaneTree::internal_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(degrees_.begin(), degrees_.end(), [](Degree d) { return d > 0; }));
}

std::string PlaneTree::to_string() const {
  std::string out;
  out.reserve(degrees_.size() * 2);
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(degrees_[i]);
  }
  return out;
}

TreeKey tree_key(std::span<const Degree> degrees) {
  TreeKey key;
  key.reserve(degrees.size());
  for (Degree d : degrees) {
    do {
      auto byte = static_cast<unsigned char>(d & 0x7F);
      d >>= 7;
      if (d) byte |= 0x80;
      key.push_back(static_cast<char>(byte));
    } while (d);
  }
  return key;
}

PlaneTree tree_from_key(std::string_view key) {
  std::vector<Degree> degrees;
  Degree value = 0;
  int shift = 0;
  for (const char c : key) {
    const auto byte = static_cast<unsigned char>(c);
    value |= static_cast<Degree>(byte & 0x7F) << shift;
    if (byte & 0x80) {
      shift += 7;
    } else {
      degrees.push_back(value);
      value = 0;
      shift = 0;
    }
  }
  return PlaneTree(std::move(degrees));
}

std::size_t unique_rotation(std::span<const Degree> degrees) {
  const std::size_t k = degrees.size();
  if (k == 0) throw std::invalid_argument("unique_rotation: empty sequence");
  if (kernels::sum(degrees) != k - 1) {
    throw std::invalid_argument("unique_rotation: degree sum must equal length - 1");
  }
  // Cycle lemma: start right after the first minimum of the walk sum(d_i - 1).
  std::int64_t walk = 0;
  std::int64_t lowest = 1;
  std::size_t argmin = 0;
  for (std::size_t j = 0; j < k; ++j) {
    walk += static_cast<std::int64_t>(degrees[j]) - 1;
    if (walk < lowest) {
      lowest = walk;
      argmin = j;
    }
  }
  return (argmin + 1) % k;
}

std::size_t rotate_to_tree(std::vector<Degree>& degrees) {
  const std::size_t r = unique_rotation(degrees);
  std::rotate(degrees.begin(), degrees.begin() + static_cast<std::ptrdiff_t>(r), degrees.end());
  return r;
}

Span subtree_span(const PlaneTree& tree, std::size_t i) {
  if (i >= tree.size()) throw std::out_of_range("subtree_span: position out of range");
  std::int64_t open = 1;
  std::size_t pos = i;
  while (open > 0) {
    open += static_cast<std::int64_t>(tree[pos]) - 1;
    ++pos;
  }
  return {i, pos};
}

std::vector<std::uint32_t> subtree_sizes(std::span<const Degree> degrees) {
  const std::size_t n = degrees.size();
  std::vector<std::uint32_t> sizes(n);
  // Reverse preorder: children are finished before their parent and sit on
  // top of the stack in left-to-right order.
  std::vector<std::uint32_t> stack;
  stack.reserve(64);
  for (std::size_t i = n; i-- > 0;) {
    std::uint32_t size = 1;
    for (Degree c = 0; c < degrees[i]; ++c) {
      size += stack.back();
      stack.pop_back();
    }
    sizes[i] = size;
    stack.push_back(size);
  }
  return sizes;
}

PlaneTree complete_r_ary(std::uint32_t r, std::uint32_t h, std::size_t size_cap) {
  if (r == 0) throw std::invalid_argument("complete_r_ary: r must be >= 1");
  // Size (r^{h+1} - 1)/(r - 1), accumulated with an overflow guard.
  std::size_t size = 0;
  std::size_t level = 1;
  for (std::uint32_t depth = 0; depth <= h; ++depth) {
    size += level;
    if (size > size_cap) throw std::length_error("complete_r_ary: tree exceeds size cap");
    if (depth < h) {
      if (level > size_cap / r) throw std::length_error("complete_r_ary: tree exceeds size cap");
      level *= r;
    }
  }
  std::vector<Degree> degrees;
  degrees.reserve(size);
  std::vector<std::uint32_t> depth_stack{0};
  while (!depth_stack.empty()) {
    const std::uint32_t depth = depth_stack.back();
    depth_stack.pop_back();
    if (depth < h) {
      degrees.push_back(r);
      for (std::uint32_t c = 0; c < r; ++c) depth_stack.push_back(depth + 1);
    } else {
      degrees.push_back(0);
    }
  }
  return PlaneTree::from_valid(std::move(degrees));
}

PlaneTree chain(std::uint32_t h) { return complete_r_ary(1, h); }

PlaneTree star(std::size_t k) {
  if (k < 2) throw std::invalid_argument("star: size must be >= 2");
  std::vector<Degree> degrees(k, 0);
  degrees[0] = static_cast<Degree>(k - 1);
  return PlaneTree::from_valid(std::move(degrees));
}

namespace {

struct Walker {
  std::size_t k;
  const std::function<bool(Degree)>& allowed;
  const std::function<bool(std::span<const Degree>)>& visit;
  std::vector<Degree> seq;

  // Fills position i given `open` pending slots; returns false to abort.
  bool step(std::size_t i, std::size_t open) {
    if (i == k) return visit(seq);
    const std::size_t remaining_after = k - 1 - i;
    // After placing d: open' = open - 1 + d, need 1 <= open' <= remaining_after
    // (or open' == 0 at the last position).
    if (i + 1 == k) {
      if (open != 1 || !allowed(0)) return true;
      seq[i] = 0;
      return visit(seq);
    }
    const std::size_t max_d = remaining_after + 1 - open;
    const std::size_t min_d = open >= 2 ? 0 : 1;
    for (std::size_t d = min_d; d <= max_d; ++d) {
      if (!allowed(static_cast<Degree>(d))) continue;
      seq[i] = static_cast<Degree>(d);
      if (!step(i + 1, open - 1 + d)) return false;
    }
    return true;
  }
};

}  // namespace

bool for_each_tree(std::size_t k, const std::function<bool(Degree)>& allowed,
                   const std::function<bool(std::span<const Degree>)>& visit) {
  if (k == 0) throw std::invalid_argument("for_each_tree: size must be >= 1");
  if (k > kEnumerationCap) throw std::length_error("for_each_tree: size above enumeration cap");
  Walker w{k, allowed, visit, std::vector<Degree>(k, 0)};
  return w.step(0, 1);
}

std::vector<PlaneTree> enumerate_trees(std::size_t k) {
  std::vector<PlaneTree> out;
  for_each_tree(k, [](Degree) { return true; }, [&](std::span<const Degree> s) {
    out.push_back(PlaneTree::from_valid({s.begin(), s.end()}));
    return true;
  });
  return out;
}

std::vector<PlaneTree> enumerate_possible(const OffspringDistribution& dist, std::size_t k_max) {
  if (k_max > kEnumerationCap) throw std::length_error("enumerate_possible: size above enumeration cap");
  std::vector<PlaneTree> out;
  const auto allowed = [&dist](Degree d) { return dist.supports(d); };
  for (std::size_t k = 1; k <= k_max; ++k) {
    for_each_tree(k, allowed, [&](std::span<const Degree> s) {
      out.push_back(PlaneTree::from_valid({s.begin(), s.end()}));
      return true;
    });
  }
  return out;
}

}  // namespace gwforest
