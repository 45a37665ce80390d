#include <gtest/gtest.h>

#include <cmath>

#include "gwforest/offspring.hpp"

using namespace gwforest;

namespace {

std::vector<OffspringDistribution> all_builtins() {
  return {builtin(Builtin::plane), builtin(Builtin::full_binary), builtin(Builtin::motzkin),
          builtin(Builtin::d_ary, 3), builtin(Builtin::labeled)};
}

}  // namespace

TEST(Offspring, BuiltinsAreCriticalAfterTruncation) {
  for (const auto& d : all_builtins()) {
    double total = 0, mean = 0;
    for (const auto& a : d.atoms()) {
      total += a.probability;
      mean += a.degree * a.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << d.name();
    EXPECT_NEAR(mean, 1.0, 1e-9) << d.name();
    EXPECT_NEAR(d.mean(), 1.0, 1e-9) << d.name();
    EXPECT_GT(d.variance(), 0.0);
  }
  EXPECT_NEAR(builtin(Builtin::plane).variance(), 2.0, 1e-9);
  EXPECT_NEAR(builtin(Builtin::full_binary).variance(), 1.0, 1e-15);
  EXPECT_NEAR(builtin(Builtin::motzkin).variance(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(builtin(Builtin::labeled).variance(), 1.0, 1e-9);
  EXPECT_NEAR(builtin(Builtin::d_ary, 3).variance(), 2.0 / 3.0, 1e-12);
}

TEST(Offspring, Spans) {
  EXPECT_EQ(builtin(Builtin::full_binary).span(), 2u);
  EXPECT_EQ(builtin(Builtin::motzkin).span(), 1u);
  EXPECT_EQ(builtin(Builtin::labeled).span(), 1u);
  EXPECT_EQ(builtin(Builtin::plane).span(), 1u);
  EXPECT_EQ(OffspringDistribution::parse_pmf("0:2/3,3:1/3").span(), 3u);
}

TEST(Offspring, TruncationIsReported) {
  const auto plane = builtin(Builtin::plane);
  EXPECT_EQ(plane.support_kind(), SupportKind::unbounded);
  EXPECT_GT(plane.truncated_mass(), 0.0);
  EXPECT_LE(plane.truncated_mass(), kDefaultTailEpsilon);
  const auto fine = builtin(Builtin::labeled, 2, 1e-300);
  EXPECT_GT(fine.max_degree(), 150u);
  EXPECT_THROW(builtin(Builtin::plane, 2, 0.1), ConfigError);
}

TEST(Offspring, ClosedFormL) {
  EXPECT_NEAR(constants(builtin(Builtin::full_binary)).L, 0.5, 1e-12);
  EXPECT_NEAR(constants(builtin(Builtin::motzkin)).L, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(constants(builtin(Builtin::plane)).L, 0.25, 1e-12);
  for (std::uint32_t d = 2; d <= 7; ++d) {
    const double expect = std::pow(d - 1.0, d - 1.0) / std::pow(d, d);
    EXPECT_NEAR(constants(builtin(Builtin::d_ary, d)).L, expect, 1e-12) << d;
  }
  EXPECT_NEAR(constants(builtin(Builtin::d_ary, 3)).L, 4.0 / 27.0, 1e-12);
}

TEST(Offspring, PlaneLkIsQuarterBeyondFirst) {
  const auto c = constants(builtin(Builtin::plane), 200);
  EXPECT_NEAR(c.L_k[0], 0.5, 1e-12);  // L_1 = p_0
  for (std::size_t k = 2; k <= 200; ++k) EXPECT_NEAR(c.L_k[k - 1], 0.25, 1e-12) << k;
}

TEST(Offspring, LkMonotone) {
  for (const auto& d : all_builtins()) {
    const auto c = constants(d, 200);
    ASSERT_EQ(c.L_k.size(), 200u);
    for (std::size_t k = 1; k < c.L_k.size(); ++k) EXPECT_LE(c.L_k[k], c.L_k[k - 1]) << d.name() << " k=" << k;
  }
}

TEST(Offspring, Kappa) {
  EXPECT_EQ(constants(builtin(Builtin::full_binary)).kappa, 2u);
  EXPECT_EQ(constants(builtin(Builtin::motzkin)).kappa, 1u);
  EXPECT_EQ(constants(builtin(Builtin::plane)).kappa, 1u);
  EXPECT_EQ(constants(builtin(Builtin::d_ary, 3)).kappa, 3u);
  const auto lab = constants(builtin(Builtin::labeled));
  EXPECT_FALSE(lab.kappa.has_value());
  EXPECT_TRUE(lab.L_truncated);
  EXPECT_FALSE(lab.well_behaved());
}

TEST(Offspring, ParsePmf) {
  const auto d = OffspringDistribution::parse_pmf("0:1/3, 1:1/3, 2:1/3");
  EXPECT_DOUBLE_EQ(d.p(1), 1.0 / 3.0);
  EXPECT_EQ(d.fingerprint(), builtin(Builtin::motzkin).fingerprint());
  const auto rt = OffspringDistribution::parse_pmf(builtin(Builtin::plane).to_pmf_string());
  EXPECT_EQ(rt.fingerprint(), builtin(Builtin::plane).fingerprint());
  EXPECT_EQ(parse_distribution("d-ary:4").fingerprint(), builtin(Builtin::d_ary, 4).fingerprint());
  EXPECT_EQ(parse_distribution("3-ary").fingerprint(), builtin(Builtin::d_ary, 3).fingerprint());
  EXPECT_EQ(parse_distribution("0:0.5,2:0.5").span(), 2u);
}

TEST(Offspring, RejectsBadLaws) {
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:0.5,1:0.2,2:0.3"), ConfigError);  // mean 0.8
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:0.5,2:0.4"), ConfigError);        // mass 0.9
  EXPECT_THROW(OffspringDistribution::parse_pmf("1:1"), ConfigError);                // variance 0
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:0.5,2:0.5,2:0.1"), ConfigError);
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:-0.5,2:1.5"), ConfigError);
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:x"), ConfigError);
  EXPECT_THROW(OffspringDistribution::parse_pmf("0:1/0"), ConfigError);
  EXPECT_THROW(parse_distribution("bogus"), ConfigError);
  EXPECT_THROW(parse_distribution("d-ary:1"), ConfigError);
}

TEST(Offspring, ZeroAtomsAreDropped) {
  const auto d = OffspringDistribution::parse_pmf("0:0.5,1:0,2:0.5");
  EXPECT_EQ(d.atoms().size(), 2u);
  EXPECT_FALSE(d.supports(1));
}

TEST(SampleDegree, FullBinaryZeros) {
  const auto d = builtin(Builtin::full_binary);
  Rng rng(11);
  int zeros = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const Degree x = sample_degree(d, rng);
    ASSERT_TRUE(x == 0 || x == 2);
    zeros += x == 0;
  }
  EXPECT_NEAR(zeros / 1e6, 0.5, 0.002);
}

TEST(SampleDegree, MotzkinSupport) {
  const auto d = builtin(Builtin::motzkin);
  Rng rng(12);
  std::array<int, 3> hist{};
  for (int i = 0; i < 300000; ++i) {
    const Degree x = sample_degree(d, rng);
    ASSERT_LE(x, 2u);
    ++hist[x];
  }
  for (int h : hist) EXPECT_NEAR(h / 300000.0, 1.0 / 3.0, 0.005);
}

TEST(SampleDegree, LabeledMeanIsOne) {
  const auto d = builtin(Builtin::labeled);
  Rng rng(13);
  double sum = 0;
  for (int i = 0; i < 1'000'000; ++i) sum += sample_degree(d, rng);
  EXPECT_NEAR(sum / 1e6, 1.0, 0.005);
}
