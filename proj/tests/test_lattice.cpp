#include <doctest.h>

#include <set>
#include <sstream>

#include "support.hpp"
#include "ultraheat/lattice.hpp"

using namespace ultraheat;

namespace {

std::vector<Rational> reps(const Lattice& lat, Side side)
{
    std::vector<Rational> out;
    for (std::size_t i = 0; i < lat.size(); ++i) out.push_back(lat.representative(i, side)[0]);
    return out;
}

} // namespace

TEST_CASE("enumeration")
{
    const Lattice a({2, 1, 1, 1});
    CHECK(reps(a, Side::position) == std::vector<Rational>{0, Rational(1, 2), 1, Rational(3, 2)});

    const Lattice b({2, 1, 0, 1});
    CHECK(reps(b, Side::position) == std::vector<Rational>{0, 1});

    const Lattice c({3, 1, 1, 1});
    CHECK(c.shell(1, Side::position).size() == 6);
    CHECK(c.shell_count(1, Side::position) == 6);

    const Lattice d({3, 2, 1, 2});
    CHECK(d.size() == 729);
    CHECK(d.cell_volume(Side::position) == doctest::Approx(1.0 / 81));
    CHECK(d.cell_volume(Side::frequency) == doctest::Approx(1.0 / 9));
    std::size_t total = 1;
    for (int g = d.min_shell(Side::position); g <= d.max_shell(Side::position); ++g) {
        CHECK(d.shell(g, Side::position).size() == d.shell_count(g, Side::position));
        total += d.shell_count(g, Side::position);
    }
    CHECK(total == d.size());
    CHECK(d.min_shell(Side::frequency) == 0);
    CHECK(d.max_shell(Side::frequency) == 2);
}

TEST_CASE("size cap")
{
    CHECK_THROWS_AS(Lattice({2, 2, 7, 7}, std::size_t{1} << 20), TooLarge);
    CHECK_THROWS_AS(Lattice({4, 1, 1, 1}), InvalidArgument);
}

TEST_CASE("coordinates round trip and norms")
{
    const Lattice lat({3, 2, 1, 1});
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto k = lat.coords(i);
        CHECK(lat.index_of(k) == i);
        const auto g = lat.norm_exponent(i, Side::position);
        const Rational n = lat.representative(i, Side::position).norm();
        if (i == 0) {
            CHECK_FALSE(g.has_value());
        } else {
            CHECK(n == rational_power(3, *g));
        }
    }
}

TEST_CASE("negate_index")
{
    const Lattice lat({3, 1, 0, 1});
    CHECK(lat.negate_index(0) == 0);
    CHECK(lat.negate_index(1) == 2);

    const Lattice big({2, 2, 2, 1});
    for (std::size_t i = 0; i < big.size(); ++i) {
        const std::size_t j = big.negate_index(i);
        CHECK(big.negate_index(j) == i);
        const auto x = big.representative(i, Side::position);
        const auto y = big.representative(j, Side::position);
        for (std::size_t a = 0; a < 2; ++a) {
            const Order v = valuation(x[a] + y[a], 2);
            CHECK((v.is_infinite() || v.value() >= big.resolution_exponent()));
        }
    }
}

TEST_CASE("integration")
{
    for (const LatticeParams q : {LatticeParams{2, 1, 3, 2}, LatticeParams{3, 2, 1, 1}, LatticeParams{5, 1, 2, 2}}) {
        const auto lat = Lattice::make(q);
        CHECK(integrate(ball_indicator(lat, Side::position, 0)).real() == doctest::Approx(1.0).epsilon(1e-14));
        LatticeField one(lat, Side::position);
        for (auto& v : one.values()) v = 1.0;
        CHECK(integrate(one).real() == doctest::Approx(std::pow(double(q.p), q.support * q.dimension)));
        for (int n = 0; n <= q.resolution; ++n) CHECK(integrate(delta_n(lat, n)).real() == doctest::Approx(1.0));
    }
}

TEST_CASE("sampling")
{
    const auto lat = Lattice::make({3, 1, 1, 1});
    const LatticeField root = sample_radial(lat, Side::position, [](std::optional<int> g) {
        return g ? std::pow(3.0, *g * 0.5) : 0.0;
    });
    std::set<double> values;
    for (const auto& v : root.values()) values.insert(v.real());
    CHECK(values.size() == 3); // norms 0, 1 and 3
    CHECK(*values.begin() == 0.0);
    CHECK(values.count(1.0) == 1);

    const LatticeField omega = sample_function(lat, Side::position, [](const Cell& c) {
        return c.representative().norm() <= 1 ? 1.0 : 0.0;
    });
    CHECK(max_abs_diff(omega, ball_indicator(lat, Side::position, 0)) == 0.0);
}

TEST_CASE("field arithmetic and csv")
{
    const auto lat = Lattice::make({2, 1, 1, 1});
    const auto other = Lattice::make({2, 1, 2, 1});
    const auto f = test_support::random_field(lat, Side::position, 1);
    CHECK_THROWS_AS(f + LatticeField(other, Side::position), DimensionMismatch);
    CHECK_THROWS_AS(f + LatticeField(lat, Side::frequency), SideMismatch);
    CHECK(max_abs_diff(f - f, LatticeField(lat, Side::position)) == 0.0);

    std::ostringstream os;
    ball_indicator(lat, Side::position, 0).write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.rfind("cell_index,digits,norm_exponent,re,im\n", 0) == 0);
    CHECK(csv.find("-inf") != std::string::npos);
}

TEST_CASE("pairwise sum")
{
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(std::span<const double>(v)) == doctest::Approx(100.0).epsilon(1e-14));
}
