#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gwforest/offspring.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

/// Law of S_m = xi_1 + ... + xi_m.
///
/// Every supported degree is a multiple of the span h, so S_m only takes
/// values in h*Z; the table stores those lattice points in a contiguous
/// window [offset, offset + values.size()) of s/h. Entries below 1e-300 at
/// either end of the window are dropped.
class ConvolutionTable {
 public:
  ConvolutionTable() = default;
  ConvolutionTable(std::uint64_t m, std::uint32_t span, std::int64_t offset, std::vector<double> values)
      : m_(m), span_(span), offset_(offset), values_(std::move(values)) {}

  std::uint64_t m() const noexcept { return m_; }
  std::uint32_t span() const noexcept { return span_; }

  /// P(S_m = s); 0 off the lattice or outside the stored window.
  double operator()(std::int64_t s) const noexcept;

  /// Smallest and largest s with a stored entry.
  std::int64_t min_value() const noexcept { return offset_ * span_; }
  std::int64_t max_value() const noexcept {
    return (offset_ + static_cast<std::int64_t>(values_.size()) - 1) * span_;
  }
  std::span<const double> lattice_values() const noexcept { return values_; }
  double total_mass() const noexcept;

 private:
  std::uint64_t m_ = 0;
  std::uint32_t span_ = 1;
  std::int64_t offset_ = 0;
  std::vector<double> values_{1.0};
};

inline constexpr double kUnderflowCut = 1e-300;
/// Largest lattice window a convolution may allocate.
inline constexpr std::size_t kConvolutionEntryCap = std::size_t{1} << 27;

/// Exact law of S_m by binary powering of the pmf (uncached).
ConvolutionTable convolve(const OffspringDistribution& dist, std::uint64_t m);

/// Memoised convolve. Safe for concurrent readers; insertion takes an
/// exclusive lock. Nearby m reuse a cached table by stepping one summand at a
/// time when that is cheaper than a fresh powering.
std::shared_ptr<const ConvolutionTable> cached_convolution(const OffspringDistribution& dist,
                                                           std::uint64_t m);
void clear_convolution_cache();

/// P(S_m = s) through the cache; 0 for s < 0.
double prob_sum(const OffspringDistribution& dist, std::uint64_t m, std::int64_t s);

/// pi(T) = prod p_{d_i}; 0 if some degree is unsupported.
double prob_tree(const OffspringDistribution& dist, const PlaneTree& t);
/// log pi(T); -inf if some degree is unsupported.
double log_prob_tree(const OffspringDistribution& dist, const PlaneTree& t);

/// pi^nf(T) = P(T embeds at the root of the unconditional tree)
///          = product of p_d over internal nodes.
double prob_nonfringe_root(const OffspringDistribution& dist, const PlaneTree& t);
double log_prob_nonfringe_root(const OffspringDistribution& dist, const PlaneTree& t);

/// P(|T| = n) = P(S_n = n - 1) / n.
double prob_total_size(const OffspringDistribution& dist, std::uint64_t n);

/// E N_T(T_n) = n pi(T) P(S_{n-k} = n-k) / P(S_n = n-1) with k = |T|.
/// Throws ConfigError when P(|T| = n) = 0.
double expected_fringe_count(const OffspringDistribution& dist, std::uint64_t n, const PlaneTree& t);

/// Same for the set of all trees of size k: n pi(S_k) P(S_{n-k} = n-k) / P(S_n = n-1),
/// with pi(S_k) = P(|T| = k).
double expected_fringe_size_count(const OffspringDistribution& dist, std::uint64_t n, std::size_t k);

/// E N^nf_T(T_n) = n pi^nf(T) P(S_{n-v} = n-v-l) / P(S_n = n-1).
double expected_nonfringe_count(const OffspringDistribution& dist, std::uint64_t n, const PlaneTree& t);

/// Overlap set: every distinct Splay(T, v, T) over internal nodes v whose
/// subtree T_v embeds at the root of T, excluding T itself.
std::vector<PlaneTree> t_boxplus_t(const PlaneTree& t);

struct MomentReport {
  double mean = 0.0;
  double second_factorial = 0.0;
  double variance = 0.0;
  /// (T', 2 n pi^nf(T') P(S_{n-v'} = n-v'-l') / P(S_n = n-1)) for T' in the overlap set.
  std::vector<std::pair<PlaneTree, double>> overlap_terms;
};

/// First two factorial moments of N^nf_T(T_n). The single-node pattern is
/// special-cased to N = n.
MomentReport second_factorial_nonfringe(const OffspringDistribution& dist, std::uint64_t n,
                                        const PlaneTree& t);

struct PminResult {
  PlaneTree tree;
  double probability = 0.0;
  double log_probability = 0.0;
};

inline constexpr std::size_t kPminCap = 10'000;

/// Least likely possible tree of size <= k and its probability, by dynamic
/// programming over (size, number of subtrees) in log space. Ties go to the
/// smaller size, then the smaller root degree, then the lexicographically
/// smallest composition of child sizes.
PminResult pmin(const OffspringDistribution& dist, std::size_t k);

/// log p^min_i for every i = 1..k (size <= i), one DP pass.
std::vector<double> log_pmin_table(const OffspringDistribution& dist, std::size_t k);

struct PoissonTv {
  double exact = 0.0;
  double bound = 0.0;
};

/// Exact TV distance between Po(mu) and Po(nu) and the |sqrt(mu) - sqrt(nu)| bound.
PoissonTv poisson_tv(double mu, double nu);

/// Po(mu) pmf on 0..x_max, where the upper tail beyond x_max is < 1e-12.
std::vector<double> poisson_pmf(double mu);

struct CouponBounds {
  double lower = 0.0;
  double upper = 1.0;
};

/// Bounds on P(all coupon types seen within m draws), for type probabilities
/// `probs`: 1 - sum (1-p_i)^m <= P <= min(1, 1 / sum (1-p_i)^m).
CouponBounds coupon_bounds(std::span<const double> probs, double m);

/// alpha_r = log_r(ln(1/p_0) + ln(1/p_r) / (r - 1)). Requires r >= 2, p_r > 0.
double alpha_r(const OffspringDistribution& dist, std::uint32_t r);

enum class KRegime {
  automatic,        // choose heuristically (labelled best-effort)
  well_behaved,     // kappa < inf: (ln n - ln ln n) / ln(1/L)
  first_order,      // log(1/p^min_k) ~ gamma k^alpha (log k)^beta
  super_exponential,  // log(1/p_i) ~ f(i), K ~ f^{-1}(ln n)
  cayley,           // log(1/p^min_i) = gamma ln i (i + O(1)), refined centerline
};

std::string to_string(KRegime regime);

struct KHint {
  KRegime regime = KRegime::automatic;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> gamma;
};

struct KPrediction {
  double value = 0.0;
  KRegime regime = KRegime::first_order;
  /// True when the regime came from the tail-classification heuristic.
  bool heuristic = false;
  /// Parameters actually used (gamma, alpha, beta for first-order/cayley;
  /// f(i) = a i^b for super-exponential).
  double gamma = 0.0, alpha = 1.0, beta = 0.0;
  double f_scale = 0.0, f_exponent = 0.0;
  std::string note;
};

/// Centerline prediction for K_n. Requires n >= 3.
KPrediction predict_K(const OffspringDistribution& dist, double n, const KHint& hint = {});

/// (1/k) * k! / (n0! ni! nj!): number of plane trees of size k with n0 leaves,
/// ni nodes of degree i and nj nodes of degree j. Requires n0 + ni + nj = k and
/// i*ni + j*nj = k - 1. Throws std::invalid_argument otherwise and
/// std::overflow_error beyond 64 bits.
std::uint64_t trinomial_tree_count(std::uint64_t k, std::uint64_t n0, std::uint64_t ni, std::uint64_t nj,
                                   std::uint64_t i, std::uint64_t j);

}  // namespace gwforest
