#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gwforest/offspring.hpp"
#include "gwforest/rng.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

/// Conditional sampling gave up after `max_rejections` failed attempts.
class SamplerExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How each rejection attempt draws the i.i.d. vector (xi_1, ..., xi_n).
enum class DrawMethod {
  /// Degree counts ~ Multinomial(n, p); the vector is a uniform shuffle of the
  /// counted multiset, built only once S_n = n - 1 is hit. Same law as
  /// per-element draws, with O(support) work per rejected attempt.
  counts,
  /// One alias-table draw per element.
  per_element,
};

struct SampleConfig {
  std::uint64_t n = 1;
  std::uint64_t max_rejections = 10'000'000;
  std::uint64_t seed = 0;
  DrawMethod method = DrawMethod::counts;
};

struct SampleStats {
  std::uint64_t attempts = 0;  // including the accepted one
};

/// Exact draw of the Galton-Watson tree conditioned on n nodes.
///
/// Rejects i.i.d. offspring vectors until S_n = n - 1, then rotates the
/// accepted vector into its unique valid cyclic shift. Throws ConfigError when
/// n - 1 is not a multiple of the span and SamplerExhausted when the attempt
/// budget runs out.
PlaneTree sample_conditional(const OffspringDistribution& dist, const SampleConfig& cfg, Rng& rng,
                             SampleStats* stats = nullptr);

/// Unconditional Galton-Watson tree, or nullopt when it would exceed size_cap.
std::optional<PlaneTree> sample_unconditional(const OffspringDistribution& dist, Rng& rng,
                                              std::uint64_t size_cap);

/// Subtree-switching coupling: with Z uniform on the n preorder positions, if
/// the fringe subtrees at position Z of both trees have k nodes, t1's subtree
/// is replaced by t2's. Otherwise t1 is returned unchanged.
PlaneTree switch_random_fringe(const PlaneTree& t1, const PlaneTree& t2, std::size_t k, Rng& rng);

/// Same as above with the position fixed (zero-based), for deterministic tests.
PlaneTree switch_fringe_at(const PlaneTree& t1, const PlaneTree& t2, std::size_t k, std::size_t z);

}  // namespace gwforest
