#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace covergrid {

// Every random stream in the project is a std::mt19937_64 (its output
// sequence is fixed by the C++ standard). Standard distributions are not
// portable across library vendors, so bounded draws go through uniform_below.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds indices into a base seed: s = mix64(s ^ index) for each index in turn.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) noexcept
{
    std::uint64_t s = mix64(base);
    for (std::uint64_t i : indices)
        s = mix64(s ^ i);
    return s;
}

/// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    std::uint64_t x = rng();
    while (x >= limit)
        x = rng();
    return x % n;
}

inline bool coin_flip(Rng& rng) { return (rng() >> 63) != 0; }

} // namespace covergrid
