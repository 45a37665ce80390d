#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gwforest/offspring.hpp"

namespace gwforest {

/// True iff `degrees` is the preorder degree sequence of a plane tree:
/// every proper prefix sum of d_i is at least its length and the total is
/// size - 1. Empty input is not a tree.
bool validate(std::span<const Degree> degrees) noexcept;

/// A rooted ordered tree stored only as its preorder degree sequence.
class PlaneTree {
 public:
  /// The single-node tree (0).
  PlaneTree() : degrees_{0} {}

  /// Throws std::invalid_argument unless `degrees` validates.
  explicit PlaneTree(std::vector<Degree> degrees);

  /// Skips validation; for callers that construct valid sequences by design.
  static PlaneTree from_valid(std::vector<Degree> degrees) noexcept;

  /// Parses "2,1,0,3,0,0,0".
  static PlaneTree parse(std::string_view text);

  std::span<const Degree> degrees() const noexcept { return degrees_; }
  std::size_t size() const noexcept { return degrees_.size(); }
  Degree operator[](std::size_t i) const noexcept { return degrees_[i]; }

  /// Number of nodes with degree > 0.
  std::size_t internal_count() const noexcept;
  std::size_t leaf_count() const noexcept { return size() - internal_count(); }

  std::string to_string() const;

  friend bool operator==(const PlaneTree&, const PlaneTree&) = default;
  friend auto operator<=>(const PlaneTree& a, const PlaneTree& b) { return a.degrees_ <=> b.degrees_; }

 private:
  std::vector<Degree> degrees_;
};

/// Canonical key of a plane tree: the degree sequence as LEB128 varints.
/// Two trees are equal iff their keys are equal.
using TreeKey = std::string;

TreeKey tree_key(std::span<const Degree> degrees);
inline TreeKey tree_key(const PlaneTree& t) { return tree_key(t.degrees()); }

/// Inverse of tree_key.
PlaneTree tree_from_key(std::string_view key);

/// Offset r such that the cyclic rotation starting at position r validates.
/// Requires sum(d) = size - 1; throws std::invalid_argument otherwise.
std::size_t unique_rotation(std::span<const Degree> degrees);

/// Rotates `degrees` in place so that it validates; returns the offset used.
std::size_t rotate_to_tree(std::vector<Degree>& degrees);

/// Zero-based half-open [begin, end) range of the fringe subtree rooted at the
/// node in preorder position `i` (zero-based).
struct Span {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

Span subtree_span(const PlaneTree& tree, std::size_t i);

/// Sizes of every fringe subtree, indexed by preorder position. O(n).
std::vector<std::uint32_t> subtree_sizes(std::span<const Degree> degrees);

/// Largest tree the named-family constructors will build.
inline constexpr std::size_t kDefaultSizeCap = std::size_t{1} << 28;

/// Complete r-ary tree of height h (a chain of h + 1 nodes when r = 1).
PlaneTree complete_r_ary(std::uint32_t r, std::uint32_t h, std::size_t size_cap = kDefaultSizeCap);

/// Chain of height h, i.e. complete_r_ary(1, h).
PlaneTree chain(std::uint32_t h);

/// (k-1, 0, ..., 0): one node of degree k - 1 and k - 1 leaves. Requires k >= 2.
PlaneTree star(std::size_t k);

inline constexpr std::size_t kEnumerationCap = 20;

/// Calls `visit` for every tree of size exactly k whose degrees all satisfy
/// `allowed`, in lexicographic order of degree sequences. Returning false from
/// `visit` stops the walk; the function then returns false.
bool for_each_tree(std::size_t k, const std::function<bool(Degree)>& allowed,
                   const std::function<bool(std::span<const Degree>)>& visit);

/// All Catalan(k - 1) plane trees of size k. Requires 1 <= k <= 20.
std::vector<PlaneTree> enumerate_trees(std::size_t k);

/// All trees of size <= k_max with positive probability under `dist`,
/// ordered by size then lexicographically. Requires k_max <= 20.
std::vector<PlaneTree> enumerate_possible(const OffspringDistribution& dist, std::size_t k_max);

}  // namespace gwforest

template <>
struct std::hash<gwforest::PlaneTree> {
  std::size_t operator()(const gwforest::PlaneTree& t) const noexcept {
    return std::hash<std::string>{}(gwforest::tree_key(t));
  }
};
