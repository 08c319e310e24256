#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kl {

/// Counter-based generator: draw k of stream s under seed is a pure function of (seed, s, k),
/// so streams can be consumed on any thread without changing the numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    std::uint64_t next() noexcept { return hash(seed_, stream_, counter_++); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() noexcept {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
        std::uint64_t z = seed ^ mix(stream + 0x632BE59BD9B4E019ULL);
        z += 0x9E3779B97F4A7C15ULL * (counter + 1);
        return mix(mix(z));
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace kl
