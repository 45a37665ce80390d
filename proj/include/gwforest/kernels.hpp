#pragma once

// Data-parallel inner loops shared by the exact and census modules.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant chosen at runtime from CPUID. The variants are required to agree
// bit for bit (the AVX2 paths avoid FMA contraction and reassociation that
// would change rounding), so results never depend on the host CPU.

#include <cstdint>
#include <span>
#include <string_view>

namespace gwforest::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best instruction set supported by this CPU and compiled into the binary.
Isa detected_isa() noexcept;

/// Instruction set the dispatched entry points currently use.
Isa active_isa() noexcept;

/// Forces the dispatched entry points onto `isa`. Requesting an ISA the host
/// cannot run falls back to scalar. Returns the ISA actually selected.
Isa select_isa(Isa isa) noexcept;

/// y[i] += alpha * x[i] for i < x.size(). Requires y.size() >= x.size().
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

/// Number of offsets i with text[i .. i + pattern.size()) == pattern.
/// An empty pattern matches nowhere.
std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept;

/// Sum of all entries, widened to 64 bits.
std::uint64_t sum(std::span<const std::uint32_t> values) noexcept;

// Fixed-ISA entry points, exposed for the equivalence tests and benchmarks.
namespace scalar {
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept;
std::uint64_t sum(std::span<const std::uint32_t> values) noexcept;
}  // namespace scalar

#if defined(GWFOREST_HAVE_AVX2)
namespace avx2 {
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
std::uint64_t count_matches(std::span<const std::uint32_t> text,
                            std::span<const std::uint32_t> pattern) noexcept;
std::uint64_t sum(std::span<const std::uint32_t> values) noexcept;
}  // namespace avx2
#endif

}  // namespace gwforest::kernels
