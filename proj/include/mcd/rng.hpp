#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mcd {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of an independent stream identified by (seed, path...). Streams with
/// different paths are decorrelated; the same path always gives the same seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix64(seed);
    for (auto p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return s;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Engine(stream_seed(seed, path));
}

// Stream tags keep harness, scan and theorem streams apart for a shared seed.
namespace stream {
inline constexpr std::uint64_t simulate = 1;
inline constexpr std::uint64_t scan_monte_carlo = 2;
inline constexpr std::uint64_t theorem = 3;
inline constexpr std::uint64_t boundary_cell = 4;
}  // namespace stream

/// Draws used by the simulation and the scan Monte Carlo. Backed by
/// Boost.Random so sequences are identical across standard libraries.
int draw_binomial(Engine& engine, int trials, double p);
int draw_poisson(Engine& engine, double mean);
double draw_normal(Engine& engine, double mean, double sd);

}  // namespace mcd
