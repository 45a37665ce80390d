// Compiled with -mavx2 (and without -mfma); only reached after a CPUID check.

#include "gwforest/kernels.hpp"

#include <immintrin.h>

#include <bit>

namespace gwforest::kernels::avx2 {

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t n = x.size();
  const double* xs = x.data();
  double* ys = y.data();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d p0 = _mm256_mul_pd(a, _mm256_loadu_pd(xs + i));
    __m256d p1 = _mm256_mul_pd(a, _mm256_loadu_pd(xs + i + 4));
    _mm256_storeu_pd(ys + i, _mm256_add_pd(_mm256_loadu_pd(ys + i), p0));
    _mm256_storeu_pd(ys + i + 4, _mm256_add_pd(_mm256_loadu_pd(ys + i + 4), p1));
  }
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(a, _mm256_loadu_pd(xs + i));
    _mm256_storeu_pd(ys + i, _mm256_add_pd(_mm256_loadu_pd(ys + i), p));
  }
  for (; i < n; ++i) {
    const double product = alpha * xs[i];
    ys[i] = ys[i] + product;
  }
}

std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept {
  const std::size_t k = pattern.size();
  if (k == 0 || k > text.size()) return 0;
  const std::size_t offsets = text.size() - k + 1;
  const auto* t = reinterpret_cast<const int*>(text.data());
  const auto* p = reinterpret_cast<const int*>(pattern.data());

  std::uint64_t count = 0;
  std::size_t i = 0;
  // Eight candidate offsets per step; each pattern position narrows the mask.
  for (; i + 8 <= offsets; i += 8) {
    __m256i mask = _mm256_cmpeq_epi32(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(t + i)), _mm256_set1_epi32(p[0]));
    for (std::size_t j = 1; j < k && !_mm256_testz_si256(mask, mask); ++j) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(t + i + j));
      mask = _mm256_and_si256(mask, _mm256_cmpeq_epi32(v, _mm256_set1_epi32(p[j])));
    }
    const int bits = _mm256_movemask_ps(_mm256_castsi256_ps(mask));
    count += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(bits)));
  }
  for (; i < offsets; ++i) {
    std::size_t j = 0;
    while (j < k && t[i + j] == p[j]) ++j;
    if (j == k) ++count;
  }
  return count;
}

std::uint64_t sum(std::span<const std::uint32_t> values) noexcept {
  const std::size_t n = values.size();
  const std::uint32_t* v = values.data();
  __m256i acc0 = _mm256_setzero_si256();
  __m256i acc1 = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(v + i));
    const __m128i hi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(v + i + 4));
    acc0 = _mm256_add_epi64(acc0, _mm256_cvtepu32_epi64(lo));
    acc1 = _mm256_add_epi64(acc1, _mm256_cvtepu32_epi64(hi));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), _mm256_add_epi64(acc0, acc1));
  std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) total += v[i];
  return total;
}

}  // namespace gwforest::kernels::avx2
