#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "gwforest/exact.hpp"
#include "gwforest/oracle.hpp"
#include "gwforest/sampler.hpp"

using namespace gwforest;

namespace {

double tv_to_exact(const OffspringDistribution& dist, std::size_t n, std::uint64_t samples, DrawMethod method,
                   std::uint64_t seed) {
  const ExactLaw law = exact_conditional_distribution(dist, n);
  std::map<TreeKey, std::uint64_t> hist;
  Rng rng(seed);
  SampleConfig cfg;
  cfg.n = n;
  cfg.method = method;
  for (std::uint64_t i = 0; i < samples; ++i) ++hist[tree_key(sample_conditional(dist, cfg, rng))];
  double diff = 0;
  for (const auto& [key, p] : law.entries) {
    const auto it = hist.find(key);
    diff += std::abs((it == hist.end() ? 0.0 : static_cast<double>(it->second) / samples) - p);
  }
  for (const auto& [key, c] : hist) {
    if (!law.entries.contains(key)) diff += static_cast<double>(c) / samples;
  }
  return diff / 2;
}

}  // namespace

TEST(Sampler, SpanMismatchIsAnError) {
  Rng rng(1);
  SampleConfig cfg;
  cfg.n = 4;
  EXPECT_THROW(sample_conditional(builtin(Builtin::full_binary), cfg, rng), ConfigError);
  cfg.n = 0;
  EXPECT_THROW(sample_conditional(builtin(Builtin::motzkin), cfg, rng), ConfigError);
}

TEST(Sampler, SizeOneIsLeaf) {
  Rng rng(2);
  SampleConfig cfg;
  cfg.n = 1;
  for (const auto& d : {builtin(Builtin::plane), builtin(Builtin::full_binary), builtin(Builtin::labeled)}) {
    EXPECT_EQ(sample_conditional(d, cfg, rng), PlaneTree());
  }
}

TEST(Sampler, PlaneSizeThreeIsUniform) {
  Rng rng(3);
  SampleConfig cfg;
  cfg.n = 3;
  const auto plane = builtin(Builtin::plane);
  int chain_count = 0;
  const int total = 1'000'000;
  for (int i = 0; i < total; ++i) chain_count += sample_conditional(plane, cfg, rng) == chain(2);
  EXPECT_NEAR(chain_count / double(total), 0.5, 0.002);
}

TEST(Sampler, MatchesExactLawSmallN) {
  for (const auto& dist : {builtin(Builtin::plane), builtin(Builtin::motzkin), builtin(Builtin::full_binary)}) {
    for (const std::size_t n : {5u, 7u}) {
      EXPECT_LE(tv_to_exact(dist, n, 1'000'000, DrawMethod::counts, 100 + n), 0.01) << dist.name() << " n=" << n;
      EXPECT_LE(tv_to_exact(dist, n, 200'000, DrawMethod::per_element, 200 + n), 0.02) << dist.name() << " n=" << n;
    }
  }
}

TEST(Sampler, LargeSamplesValidate) {
  Rng rng(4);
  SampleConfig cfg;
  for (const auto& dist : {builtin(Builtin::plane), builtin(Builtin::labeled), builtin(Builtin::d_ary, 3)}) {
    cfg.n = 100'000;
    const auto t = sample_conditional(dist, cfg, rng);
    EXPECT_EQ(t.size(), cfg.n);
    EXPECT_TRUE(validate(t.degrees()));
    for (const Degree d : t.degrees()) ASSERT_TRUE(dist.supports(d));
  }
  cfg.n = 100'001;
  const auto fb = sample_conditional(builtin(Builtin::full_binary), cfg, rng);
  EXPECT_TRUE(validate(fb.degrees()));
}

TEST(Sampler, Deterministic) {
  SampleConfig cfg;
  cfg.n = 501;
  Rng a(77), b(77);
  const auto d = builtin(Builtin::motzkin);
  EXPECT_EQ(sample_conditional(d, cfg, a), sample_conditional(d, cfg, b));
}

TEST(Sampler, RejectionRateScalesAsRootN) {
  const auto d = builtin(Builtin::motzkin);
  const auto mean_attempts = [&](std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    SampleConfig cfg;
    cfg.n = n;
    double total = 0;
    const int reps = 4000;
    for (int i = 0; i < reps; ++i) {
      SampleStats stats;
      sample_conditional(d, cfg, rng, &stats);
      total += static_cast<double>(stats.attempts);
    }
    return total / reps;
  };
  const double a1 = mean_attempts(1000, 5), a4 = mean_attempts(4000, 6);
  const double ratio = a4 / a1;  // sqrt(4) = 2
  EXPECT_GT(ratio, 2.0 / 1.5);
  EXPECT_LT(ratio, 2.0 * 1.5);
  // Mean attempts is 1 / P(S_n = n - 1).
  EXPECT_NEAR(a1 * prob_sum(d, 1000, 999), 1.0, 0.06);
}

TEST(Sampler, ExhaustionIsDistinct) {
  Rng rng(8);
  SampleConfig cfg;
  cfg.n = 1'000'000;
  cfg.max_rejections = 1;
  EXPECT_THROW(sample_conditional(builtin(Builtin::motzkin), cfg, rng), SamplerExhausted);
}

TEST(Unconditional, FullBinarySizesAreOdd) {
  Rng rng(9);
  const auto d = builtin(Builtin::full_binary);
  for (int i = 0; i < 20000; ++i) {
    const auto t = sample_unconditional(d, rng, 100000);
    if (t) ASSERT_EQ(t->size() % 2, 1u);
  }
}

TEST(Unconditional, SizeFrequencies) {
  Rng rng(10);
  const auto plane = builtin(Builtin::plane);
  const int total = 1'000'000;
  int ones = 0, threes = 0;
  for (int i = 0; i < total; ++i) {
    const auto t = sample_unconditional(plane, rng, 1000);
    if (!t) continue;
    ones += t->size() == 1;
    threes += t->size() == 3;
  }
  const double p0 = plane.p(0);
  EXPECT_NEAR(ones / double(total), p0, 3 * std::sqrt(p0 * (1 - p0) / total));
  EXPECT_NEAR(threes / double(total), 1.0 / 16, 0.001);
  EXPECT_NEAR(prob_total_size(plane, 3), 1.0 / 16, 1e-14);
}

TEST(Unconditional, OverflowIsAValue) {
  Rng rng(11);
  int overflow = 0;
  for (int i = 0; i < 1000; ++i) overflow += !sample_unconditional(builtin(Builtin::plane), rng, 2).has_value();
  EXPECT_GT(overflow, 0);
  EXPECT_THROW(sample_unconditional(builtin(Builtin::plane), rng, 0), ConfigError);
}

TEST(Switching, Identities) {
  const auto t = PlaneTree::parse("2,0,0");
  Rng rng(12);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(switch_random_fringe(t, t, 1, rng), t);
  const auto a = PlaneTree::parse("2,1,0,1,0");
  const auto b = PlaneTree::parse("2,0,1,1,0");
  // Position 1 roots (1,0) in a but a leaf in b: no switch.
  EXPECT_EQ(switch_fringe_at(a, b, 2, 1), a);
}

TEST(Switching, ReplacesEqualSizeSubtrees) {
  const auto a = PlaneTree::parse("2,2,0,0,0");
  const auto b = PlaneTree::parse("2,1,1,0,0");
  EXPECT_EQ(switch_fringe_at(a, b, 3, 1), b);
  EXPECT_EQ(switch_fringe_at(a, b, 3, 0), a);
  EXPECT_THROW(switch_fringe_at(a, PlaneTree(), 1, 0), std::invalid_argument);
}

TEST(Switching, PreservesConditionalLaw) {
  const auto plane = builtin(Builtin::plane);
  const ExactLaw law = exact_conditional_distribution(plane, 5);
  ASSERT_EQ(law.entries.size(), 14u);
  Rng rng(13);
  SampleConfig cfg;
  cfg.n = 5;
  std::map<TreeKey, double> hist;
  const int runs = 300'000;
  for (int i = 0; i < runs; ++i) {
    const auto t1 = sample_conditional(plane, cfg, rng);
    const auto t2 = sample_conditional(plane, cfg, rng);
    hist[tree_key(switch_random_fringe(t1, t2, 2, rng))] += 1.0 / runs;
  }
  double diff = 0;
  for (const auto& [key, p] : law.entries) diff += std::abs(hist[key] - p);
  EXPECT_LE(diff / 2, 0.015);
}
