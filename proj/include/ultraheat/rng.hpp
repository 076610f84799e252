#pragma once

// Counter-based normal variates. A draw is a pure function of
// (seed, step, slot), so replicas and steps can be generated in any order.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ultraheat {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica)
{
    return master ^ replica;
}

struct NormalPair
{
    double g;
    double h;
};

/// Two independent standard normals for counter (seed, step, slot), by
/// Box-Muller on two hashed uniforms.
inline NormalPair normal_pair(std::uint64_t seed, std::uint64_t step, std::uint64_t slot)
{
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ step) ^ slot);
    const std::uint64_t a = splitmix64(key);
    const std::uint64_t b = splitmix64(key ^ 0xD1B54A32D192ED03ULL);
    // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

} // namespace ultraheat
