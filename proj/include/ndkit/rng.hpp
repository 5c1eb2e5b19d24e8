#pragma once

#include <cstdint>

namespace ndkit {

/// SplitMix64 (Steele, Lea, Flood). Small, seedable and splittable: streams
/// for independent trials are derived from (master seed, stream index), so
/// results do not depend on which worker runs which trial.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Generator for stream `index` of `seed`.
    static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(seed + kGamma * (index + 1)) ^ mix(index));
    }

    constexpr std::uint64_t next() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform integer in [0, bound). Rejection sampling keeps it exact and
    /// identical on every platform, unlike std::uniform_int_distribution.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

}  // namespace ndkit
