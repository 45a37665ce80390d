#include <gtest/gtest.h>

#include <json.hpp>

#include "gwforest/exact.hpp"
#include "gwforest/experiments.hpp"

using namespace gwforest;

namespace {

RunOptions small(std::uint64_t reps, unsigned threads, std::uint64_t seed = 17) {
  RunOptions o;
  o.replicates = reps;
  o.threads = threads;
  o.seed = seed;
  return o;
}

std::uint64_t mass(const ExperimentRow& row) {
  std::uint64_t total = 0;
  for (const auto& [x, c] : row.histogram) total += c;
  return total;
}

}  // namespace

TEST(Experiments, ReproducibleAcrossThreadCounts) {
  const auto motz = builtin(Builtin::motzkin);
  const std::vector<std::uint64_t> ns{101, 301};
  const auto a = run_poisson_regimes(motz, ns, "chain:floor(log(n)/log(3))", small(300, 1));
  const auto b = run_poisson_regimes(motz, ns, "chain:floor(log(n)/log(3))", small(300, 4));
  const auto c = run_poisson_regimes(motz, ns, "chain:floor(log(n)/log(3))", small(300, 3));
  EXPECT_TRUE(same_results(a, b));
  EXPECT_TRUE(same_results(a, c));
  EXPECT_EQ(to_csv(a), to_csv(b));
  const auto d = run_poisson_regimes(motz, ns, "chain:floor(log(n)/log(3))", small(300, 1, 18));
  EXPECT_FALSE(same_results(a, d));
}

TEST(Experiments, RowInvariants) {
  const auto plane = builtin(Builtin::plane);
  const std::vector<std::uint64_t> ns{200};
  const auto opts = small(400, 2);
  std::vector<ExperimentSummary> all{
      run_poisson_regimes(plane, ns, "chain:3", opts), run_size_class(plane, ns, "2", opts),
      run_nonfringe_concentration(plane, ns, "rary:2:1", opts), run_heights(plane, ns, 2, HeightMode::fringe, opts),
      run_heights(plane, ns, 1, HeightMode::nonfringe, opts), run_Kn(plane, ns, 8, opts)};
  for (const auto& s : all) {
    ASSERT_EQ(s.rows.size(), 1u) << s.kind;
    const auto& row = s.rows[0];
    EXPECT_EQ(mass(row), 400u) << s.kind;
    if (row.tv) {
      EXPECT_GE(*row.tv, 0.0);
      EXPECT_LE(*row.tv, 1.0);
      EXPECT_GT(*row.tv_bias_bound, 0.0);
    }
    EXPECT_LE(row.quantiles.at("q05"), row.quantiles.at("median"));
    EXPECT_LE(row.quantiles.at("median"), row.quantiles.at("q95"));
    const auto j = nlohmann::json::parse(to_json(s));
    EXPECT_EQ(j["config"]["seed"], 17);
    EXPECT_EQ(j["rows"].size(), 1u);
    EXPECT_NE(to_csv(s).find("200,"), std::string::npos);
  }
}

TEST(Experiments, SizeClassLeavesConcentrate) {
  const auto motz = builtin(Builtin::motzkin);
  const auto s = run_size_class(motz, {2001}, "1", small(200, 2));
  const auto& row = s.rows[0];
  EXPECT_NEAR(row.diagnostics.at("mean_over_n"), motz.p(0), 0.01);
  EXPECT_NEAR(row.mean, row.diagnostics.at("exact_mean"), 0.01 * row.mean);
}

TEST(Experiments, NonfringeDominatesFringeHeight) {
  const auto motz = builtin(Builtin::motzkin);
  const auto f = run_heights(motz, {3001}, 1, HeightMode::fringe, small(100, 1));
  const auto nf = run_heights(motz, {3001}, 1, HeightMode::nonfringe, small(100, 1));
  // Same seeds, same trees: per-replicate domination shows up in every quantile.
  for (const auto& [q, v] : f.rows[0].quantiles) EXPECT_GE(nf.rows[0].quantiles.at(q), v) << q;
}

TEST(Experiments, ConfigErrors) {
  const auto fb = builtin(Builtin::full_binary);
  EXPECT_THROW(run_Kn(fb, {100}, 8, small(10, 1)), ConfigError);
  EXPECT_THROW(run_Kn(fb, {101}, 17, small(10, 1)), ConfigError);
  EXPECT_THROW(run_size_class(fb, {}, "1", small(10, 1)), ConfigError);
  EXPECT_THROW(run_poisson_regimes(fb, {101}, "nope:3", small(10, 1)), ConfigError);
  EXPECT_THROW(run_heights(fb, {101}, 0, HeightMode::fringe, small(10, 1)), ConfigError);
  RunOptions none = small(0, 1);
  EXPECT_THROW(run_size_class(fb, {101}, "1", none), ConfigError);
}

TEST(Experiments, LargePatternIsFlagged) {
  const auto s = run_poisson_regimes(builtin(Builtin::plane), {20}, "chain:4", small(20, 1));
  EXPECT_FALSE(s.rows[0].warnings.empty());
}

TEST(Experiments, ImpossibleArityIsFlagged) {
  const auto s = run_heights(builtin(Builtin::full_binary), {101}, 3, HeightMode::fringe, small(10, 1));
  EXPECT_FALSE(s.rows[0].warnings.empty());
  EXPECT_EQ(s.rows[0].histogram.at(0), 10u);
}
