#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwforest/offspring.hpp"
#include "gwforest/tree.hpp"

namespace gwforest {

struct RunOptions {
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 1;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  std::uint64_t max_rejections = 10'000'000;
};

/// Statistics of one integer statistic over the replicates at one n.
struct ExperimentRow {
  std::uint64_t n = 0;
  std::string statistic;
  /// The pattern used at this n, when there is one.
  std::string pattern;
  std::map<std::uint64_t, std::uint64_t> histogram;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  /// Inverse-CDF quantiles at 5, 25, 50, 75, 95 %.
  std::map<std::string, double> quantiles;
  /// Poisson mean of the reference law, if any, and the empirical TV to it.
  std::optional<double> reference_mean;
  std::optional<double> tv;
  /// 0.5 sqrt(support / R): plug-in upward bias scale of the TV estimate.
  std::optional<double> tv_bias_bound;
  /// Experiment-specific numbers (centerlines, ratios, exact expectations).
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

struct ExperimentSummary {
  std::string kind;
  std::string distribution;
  std::string pmf;
  std::vector<std::uint64_t> n_values;
  std::string rule;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<ExperimentRow> rows;
  double runtime_seconds = 0.0;
};

/// Equal up to runtime.
bool same_results(const ExperimentSummary& a, const ExperimentSummary& b);

/// Fringe count of the pattern T_n against Po(n pi(T_n)).
ExperimentSummary run_poisson_regimes(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                                      const std::string& pattern_rule, const RunOptions& opts);

/// N_{S_k}, the number of fringe subtrees with k nodes, against Po(n P(|T| = k)).
ExperimentSummary run_size_class(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                                 const std::string& k_rule, const RunOptions& opts);

/// Non-fringe count of T_n, its ratio to n pi^nf(T_n), and the chain
/// variance-inflation reference (1 + p_1) / (1 - p_1).
ExperimentSummary run_nonfringe_concentration(const OffspringDistribution& dist,
                                              const std::vector<std::uint64_t>& n_list,
                                              const std::string& pattern_rule, const RunOptions& opts);

enum class HeightMode { fringe, nonfringe };

/// Height of the tallest complete r-ary fringe (or non-fringe) subtree.
ExperimentSummary run_heights(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                              std::uint32_t r, HeightMode mode, const RunOptions& opts);

/// K_n against the predict_K centerline.
ExperimentSummary run_Kn(const OffspringDistribution& dist, const std::vector<std::uint64_t>& n_list,
                         std::size_t k_cap, const RunOptions& opts);

/// Long format: n,statistic,key,value.
std::string to_csv(const ExperimentSummary& summary);
/// Config echo plus results.
std::string to_json(const ExperimentSummary& summary, int indent = 2);

}  // namespace gwforest
