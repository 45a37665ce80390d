#include <atomic>

#include "gwforest/kernels.hpp"

namespace gwforest::kernels {
namespace {

struct Table {
  Isa isa;
  void (*axpy)(double, std::span<const double>, std::span<double>) noexcept;
  std::uint64_t (*count_matches)(std::span<const std::uint32_t>, std::span<const std::uint32_t>) noexcept;
  std::uint64_t (*sum)(std::span<const std::uint32_t>) noexcept;
};

constexpr Table kScalar{Isa::scalar, &scalar::axpy, &scalar::count_matches, &scalar::sum};
#if defined(GWFOREST_HAVE_AVX2)
constexpr Table kAvx2{Isa::avx2, &avx2::axpy, &avx2::count_matches, &avx2::sum};
#endif

bool host_has_avx2() noexcept {
#if defined(GWFOREST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* table_for(Isa isa) noexcept {
#if defined(GWFOREST_HAVE_AVX2)
  if (isa == Isa::avx2 && host_has_avx2()) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

std::atomic<const Table*>& current() noexcept {
  static std::atomic<const Table*> table{table_for(detected_isa())};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() noexcept { return host_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return current().load(std::memory_order_acquire)->isa; }

Isa select_isa(Isa isa) noexcept {
  const Table* table = table_for(isa);
  current().store(table, std::memory_order_release);
  return table->isa;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  current().load(std::memory_order_acquire)->axpy(alpha, x, y);
}

std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept {
  return current().load(std::memory_order_acquire)->count_matches(text, pattern);
}

std::uint64_t sum(std::span<const std::uint32_t> values) noexcept {
  return current().load(std::memory_order_acquire)->sum(values);
}

}  // namespace gwforest::kernels
