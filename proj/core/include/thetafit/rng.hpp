#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thetafit {

/// Deterministic splitmix64-based generator with independent streams.
/// The same (seed, stream) pair yields the same sequence on every platform;
/// distinct stream ids give statistically independent sequences, which makes
/// per-trajectory streams safe to generate in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform double in [0, 1).
    double uniform01() noexcept;

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept;

    /// Standard normal via the Box-Muller transform; draws two uniforms and
    /// caches the second variate.
    double normal() noexcept;

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Seeded in-place Fisher-Yates shuffle.
void shuffle(std::span<std::size_t> values, Rng& rng) noexcept;

}  // namespace thetafit
