#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gwforest/rng.hpp"

namespace gwforest {

using Degree = std::uint32_t;

/// Raised for malformed or non-critical offspring laws and bad config values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SupportKind { finite, unbounded };

/// A (degree, probability) pair with probability > 0.
struct Atom {
  Degree degree;
  double probability;
};

/// A critical offspring law {p_i}: sum p_i = 1, mean 1, 0 < variance < inf.
///
/// Unbounded laws (Geometric, Poisson) are stored truncated at the first index
/// whose upper tail mass is at most `tail_epsilon`, then renormalised; the
/// removed mass is kept in `truncated_mass()` so downstream results can report
/// it. Immutable after construction and safe to share between threads.
class OffspringDistribution {
 public:
  /// Validates and builds a law from explicit atoms. Zero-probability entries
  /// are dropped; duplicates, negative values and non-critical laws throw.
  static OffspringDistribution from_atoms(std::vector<Atom> atoms, std::string name = "custom",
                                          SupportKind kind = SupportKind::finite,
                                          double tail_epsilon = 0.0, double truncated_mass = 0.0);

  /// Parses "i:p,i:p,..." (probabilities as decimals or a/b fractions).
  static OffspringDistribution parse_pmf(std::string_view text);

  const std::string& name() const noexcept { return name_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  SupportKind support_kind() const noexcept { return kind_; }
  double tail_epsilon() const noexcept { return tail_epsilon_; }
  double truncated_mass() const noexcept { return truncated_mass_; }

  /// P(xi = d); zero outside the support.
  double p(Degree d) const noexcept { return d < dense_.size() ? dense_[d] : 0.0; }
  bool supports(Degree d) const noexcept { return p(d) > 0.0; }
  Degree max_degree() const noexcept { return static_cast<Degree>(dense_.size() - 1); }
  /// Dense pmf indexed by degree, zeros included.
  std::span<const double> dense() const noexcept { return dense_; }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  /// gcd{i >= 1 : p_i > 0}.
  std::uint32_t span() const noexcept { return span_; }
  double p_max() const noexcept { return p_max_; }

  /// Content hash of the stored pmf; equal laws hash equally.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  /// Draws a degree with probability p_i. Walker alias table, O(1) per draw.
  Degree sample(Rng& rng) const noexcept;

  /// Round-trippable "i:p,..." rendering with 17 significant digits.
  std::string to_pmf_string() const;

 private:
  OffspringDistribution() = default;

  std::string name_;
  SupportKind kind_ = SupportKind::finite;
  double tail_epsilon_ = 0.0;
  double truncated_mass_ = 0.0;
  std::vector<Atom> atoms_;
  std::vector<double> dense_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::uint32_t span_ = 1;
  double p_max_ = 0.0;
  std::uint64_t fingerprint_ = 0;
  // Alias table over atoms_.
  std::vector<double> alias_threshold_;
  std::vector<std::uint32_t> alias_index_;
};

enum class Builtin { plane, full_binary, motzkin, d_ary, labeled };

inline constexpr double kDefaultTailEpsilon = 1e-15;

/// The named laws: plane = Geometric(1/2), full-binary = 2 Be(1/2),
/// motzkin = uniform on {0,1,2}, d-ary = Binomial(d, 1/d), labeled = Poisson(1).
OffspringDistribution builtin(Builtin which, std::uint32_t d = 2,
                              double tail_epsilon = kDefaultTailEpsilon);

/// Accepts a builtin name ("plane", "full-binary", "motzkin", "labeled",
/// "d-ary:3" or "3-ary") or an explicit pmf "0:0.5,2:0.5".
OffspringDistribution parse_distribution(std::string_view text,
                                         double tail_epsilon = kDefaultTailEpsilon);

Degree sample_degree(const OffspringDistribution& dist, Rng& rng) noexcept;

/// Scalar constants derived from the pmf.
///
/// L_k uses the running-minimum convention L_k = min(p_0, min_{i in I_{k-1}}
/// p_0 (p_i/p_0)^{1/i}); this coincides with the usual definition whenever
/// I_{k-1} is non-empty and p_i <= p_0, and keeps the table non-increasing.
struct DistributionConstants {
  double sigma2 = 0.0;
  std::uint32_t span = 1;
  double p_max = 0.0;
  double L = 0.0;
  /// Smallest support index i >= 1 with p_0 (p_i/p_0)^{1/i} = L (within 1e-12);
  /// empty means infinity.
  std::optional<std::uint32_t> kappa;
  /// Set when the infimum was taken over a truncated support and is attained
  /// only at the cutoff, so the true L may be smaller (typically 0).
  bool L_truncated = false;
  /// L_k for k = 1..k_max, stored at index k - 1.
  std::vector<double> L_k;

  bool well_behaved() const noexcept { return kappa.has_value(); }
};

DistributionConstants constants(const OffspringDistribution& dist, std::uint32_t k_max = 200);

/// p_0 (p_i / p_0)^{1/i}, the per-degree quantity minimised by L.
double L_candidate(const OffspringDistribution& dist, Degree i);

}  // namespace gwforest
