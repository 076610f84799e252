#pragma once

#include <random>

#include "ultraheat/lattice.hpp"

namespace test_support {

inline ultraheat::LatticeField random_field(const ultraheat::LatticePtr& lattice, ultraheat::Side side,
                                            std::uint64_t seed, bool real = false)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    ultraheat::LatticeField f(lattice, side);
    for (auto& v : f.values()) v = real ? std::complex<double>(n(gen), 0) : std::complex<double>(n(gen), n(gen));
    return f;
}

} // namespace test_support
