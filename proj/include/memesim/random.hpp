#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace memesim {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a sub-stream identified by a path of indices, e.g.
/// derive_seed(master, {cell, replica}). Depends only on the inputs, never
/// on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = mix64(master);
    for (auto p : path)
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform_open_closed(Rng& rng) noexcept
{
    return 1.0 - uniform01(rng);
}

inline bool bernoulli(Rng& rng, double p) noexcept
{
    return uniform01(rng) < p;
}

/// Uniform integer on [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

} // namespace memesim
