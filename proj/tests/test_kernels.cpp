#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "gwforest/kernels.hpp"

namespace k = gwforest::kernels;

namespace {

bool have_avx2() { return k::detected_isa() == k::Isa::avx2; }

}  // namespace

TEST(Kernels, ScalarReference) {
  std::vector<double> y{1, 2, 3};
  const std::vector<double> x{1, 1, 1};
  k::scalar::axpy(2.0, x, y);
  EXPECT_EQ(y, (std::vector<double>{3, 4, 5}));
  const std::vector<std::uint32_t> text{0, 1, 0, 1, 0, 1, 0};
  const std::vector<std::uint32_t> pat{0, 1, 0};
  EXPECT_EQ(k::scalar::count_matches(text, pat), 3u);
  EXPECT_EQ(k::scalar::sum(text), 3u);
  EXPECT_EQ(k::scalar::count_matches(pat, text), 0u);
}

#ifdef GWFOREST_HAVE_AVX2
TEST(Kernels, Avx2AxpyBitwiseEqual) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (std::size_t len = 0; len < 70; ++len) {
    std::vector<double> x(len), y1(len);
    for (auto& v : x) v = u(gen) * std::exp(u(gen) / 50);
    for (auto& v : y1) v = u(gen);
    auto y2 = y1;
    const double a = u(gen);
    k::scalar::axpy(a, x, y1);
    k::avx2::axpy(a, x, y2);
    ASSERT_EQ(0, std::memcmp(y1.data(), y2.data(), len * sizeof(double))) << "len " << len;
  }
}

TEST(Kernels, Avx2CountMatchesEqual) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = gen() % 200, m = 1 + gen() % 12;
    const std::uint32_t alphabet = 1 + gen() % 3;
    std::vector<std::uint32_t> text(n), pat(m);
    for (auto& v : text) v = static_cast<std::uint32_t>(gen() % alphabet);
    for (auto& v : pat) v = static_cast<std::uint32_t>(gen() % alphabet);
    ASSERT_EQ(k::scalar::count_matches(text, pat), k::avx2::count_matches(text, pat));
  }
  // Highly periodic text: every offset matches.
  std::vector<std::uint32_t> zeros(1000, 0), pz(5, 0);
  EXPECT_EQ(k::avx2::count_matches(zeros, pz), 996u);
  std::vector<std::uint32_t> big{0xFFFFFFFFu, 7, 0xFFFFFFFFu, 7};
  std::vector<std::uint32_t> pb{0xFFFFFFFFu, 7};
  EXPECT_EQ(k::avx2::count_matches(big, pb), 2u);
}

TEST(Kernels, Avx2SumEqual) {
  if (!have_avx2()) GTEST_SKIP() << "CPU lacks AVX2";
  std::mt19937_64 gen(3);
  for (std::size_t len = 0; len < 100; ++len) {
    std::vector<std::uint32_t> v(len);
    for (auto& x : v) x = static_cast<std::uint32_t>(gen());
    ASSERT_EQ(k::scalar::sum(v), k::avx2::sum(v));
  }
  std::vector<std::uint32_t> big(1 << 16, 0xFFFFFFFFu);
  EXPECT_EQ(k::avx2::sum(big), std::uint64_t{0xFFFFFFFFu} << 16);
}
#endif

TEST(Kernels, DispatchSelection) {
  const k::Isa before = k::active_isa();
  EXPECT_EQ(k::select_isa(k::Isa::scalar), k::Isa::scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::scalar);
  const std::vector<std::uint32_t> text{2, 0, 0, 2, 0, 0};
  const std::vector<std::uint32_t> pat{0, 0};
  EXPECT_EQ(k::count_matches(text, pat), 2u);
  const k::Isa chosen = k::select_isa(k::Isa::avx2);
  EXPECT_EQ(chosen, have_avx2() ? k::Isa::avx2 : k::Isa::scalar);
  EXPECT_EQ(k::count_matches(text, pat), 2u);
  k::select_isa(before);
  EXPECT_EQ(k::to_string(k::Isa::scalar), "scalar");
}
