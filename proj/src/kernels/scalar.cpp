#include "gwforest/kernels.hpp"

#include <algorithm>

namespace gwforest::kernels::scalar {

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Keep multiply and add as two rounded operations so this matches avx2::axpy.
    const double product = alpha * x[i];
    y[i] = y[i] + product;
  }
}

std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept {
  const std::size_t k = pattern.size();
  if (k == 0 || k > text.size()) return 0;
  std::uint64_t count = 0;
  const std::size_t last = text.size() - k;
  for (std::size_t i = 0; i <= last; ++i) {
    if (text[i] != pattern[0]) continue;
    if (std::equal(pattern.begin() + 1, pattern.end(), text.begin() + static_cast<std::ptrdiff_t>(i) + 1)) {
      ++count;
    }
  }
  return count;
}

std::uint64_t sum(std::span<const std::uint32_t> values) noexcept {
  std::uint64_t total = 0;
  for (const std::uint32_t v : values) total += v;
  return total;
}

}  // namespace gwforest::kernels::scalar
