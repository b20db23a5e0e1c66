#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace agentsim {

/// SplitMix64 finalizer; used to derive independent seeds from tuples.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto p : parts) {
        h = mix64(h ^ p);
    }
    return h;
}

/// Portable random stream. std::mt19937_64 output is fixed by the standard, but
/// the std distributions are not, so the mapping to ranges is done here.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Lemire-style rejection to remove modulo bias.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(below(span));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace agentsim
