#include <doctest.h>

#include "support.hpp"
#include "ultraheat/transform.hpp"

using namespace ultraheat;
using test_support::random_field;

TEST_CASE("indicator of the unit ball is self dual")
{
    for (const LatticeParams q : {LatticeParams{2, 1, 3, 3}, LatticeParams{3, 2, 1, 2}, LatticeParams{5, 1, 2, 1}}) {
        const auto lat = Lattice::make(q);
        const LatticeField omega = ball_indicator(lat, Side::position, 0);
        CHECK(max_abs_diff(forward(omega), ball_indicator(lat, Side::frequency, 0)) <= 1e-12);
        CHECK(max_abs_diff(naive_transform(omega), ball_indicator(lat, Side::frequency, 0)) <= 1e-12);
    }
}

TEST_CASE("constant on the support maps to a scaled low-frequency indicator")
{
    const auto lat = Lattice::make({3, 1, 2, 1});
    LatticeField one(lat, Side::position);
    for (auto& v : one.values()) v = 1.0;
    LatticeField expected = ball_indicator(lat, Side::frequency, -2);
    expected *= 9.0;
    CHECK(max_abs_diff(forward(one), expected) <= 1e-12);
}

TEST_CASE("linearity, round trip, double transform, Parseval")
{
    for (const LatticeParams q : {LatticeParams{2, 1, 4, 3}, LatticeParams{3, 2, 1, 1}, LatticeParams{7, 1, 1, 1}}) {
        const auto lat = Lattice::make(q);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto f = random_field(lat, Side::position, 2 * s);
            const auto g = random_field(lat, Side::position, 2 * s + 1);
            const std::complex<double> a(0.3, -1.2), b(2.0, 0.5);
            CHECK(max_abs_diff(forward(a * f + b * g), a * forward(f) + b * forward(g)) <= 1e-12);
            CHECK(max_abs_diff(inverse(forward(f)), f) <= 1e-12);

            // F applied twice, reading the frequency result as a position field, is f(-x).
            // The two grids coincide only when M = m.
            const LatticeField ff = forward(f);
            if (q.support == q.resolution) {
                LatticeField as_position(lat, Side::position, ff.values());
                const LatticeField twice = forward(as_position);
                for (std::size_t i = 0; i < lat->size(); ++i)
                    CHECK(std::abs(twice[i] - f[lat->negate_index(i)]) <= 1e-12 * (1 + std::abs(f[i])));
            }

            double ex = 0, ef = 0;
            for (const auto& v : f.values()) ex += std::norm(v);
            for (const auto& v : ff.values()) ef += std::norm(v);
            ex *= lat->cell_volume(Side::position);
            ef *= lat->cell_volume(Side::frequency);
            CHECK(ex == doctest::Approx(ef).epsilon(1e-12));
        }
    }
}

TEST_CASE("fast matches naive")
{
    for (const LatticeParams q : {LatticeParams{2, 1, 3, 3}, LatticeParams{3, 2, 1, 1}, LatticeParams{5, 2, 1, 0},
                                  LatticeParams{2, 3, 1, 1}}) {
        const auto lat = Lattice::make(q);
        const TransformPlan plan(lat);
        for (std::uint64_t s = 0; s < 3; ++s) {
            const auto f = random_field(lat, Side::position, s);
            CHECK(max_abs_diff(plan.fast(f), plan.naive(f)) <= 1e-12);
            const auto g = random_field(lat, Side::frequency, s + 10);
            CHECK(max_abs_diff(plan.fast(g), plan.naive(g)) <= 1e-12);
        }
    }
}

TEST_CASE("side checks")
{
    const auto lat = Lattice::make({2, 1, 1, 1});
    CHECK_THROWS_AS(forward(LatticeField(lat, Side::frequency)), SideMismatch);
    CHECK_THROWS_AS(inverse(LatticeField(lat, Side::position)), SideMismatch);
}

TEST_CASE("convolution")
{
    const auto lat = Lattice::make({2, 1, 3, 3});
    const auto f = random_field(lat, Side::position, 5);
    const auto g = random_field(lat, Side::position, 6);
    CHECK(max_abs_diff(convolve(f, g), convolve(g, f)) <= 1e-12);
    CHECK(max_abs_diff(convolve(f, delta_n(lat, 3)), f) <= 1e-12);
    // A delta at coarser scale averages over balls of radius p^-n.
    const LatticeField smooth = convolve(ball_indicator(lat, Side::position, -1), delta_n(lat, 1));
    CHECK(max_abs_diff(smooth, ball_indicator(lat, Side::position, -1)) <= 1e-12);
}
