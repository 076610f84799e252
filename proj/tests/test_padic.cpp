#include <doctest.h>

#include "ultraheat/padic.hpp"

using namespace ultraheat;

TEST_CASE("valuation and norm")
{
    CHECK(valuation(Rational(18), 3) == Order(2));
    CHECK(norm(Rational(18), 3) == Rational(1, 9));
    CHECK(valuation(Rational(0), 5).is_infinite());
    CHECK(norm(Rational(0), 5) == 0);
    CHECK(valuation(Rational(5, 12), 2) == Order(-2));
    CHECK(norm(Rational(5, 12), 2) == 4);

    const PAdicVector v(3, {Rational(1), Rational(3)});
    CHECK(v.norm() == 1);
    CHECK(v.order() == Order(0));
}

TEST_CASE("order arithmetic")
{
    CHECK(Order(3) < Order::infinity());
    CHECK_FALSE(Order::infinity() < Order(3));
    CHECK(min(Order(2), Order(-1)) == Order(-1));
    CHECK(Order::infinity().str() == "inf");
    CHECK_THROWS_AS(Order::infinity().value(), InvalidArgument);
}

TEST_CASE("scalar digits")
{
    // 18 = 3^2 * 2
    const PAdicScalar x(Rational(18), 3, 4);
    CHECK(x.order() == Order(2));
    REQUIRE(x.digits().size() == 4);
    CHECK(x.digits()[0] == 2);
    CHECK(x.digits()[1] == 0);
    CHECK(x.norm() == Rational(1, 9));

    // -1 = (p-1)(1 + p + p^2 + ...)
    const PAdicScalar m(Rational(-1), 5, 6);
    for (auto d : m.digits()) CHECK(d == 4);

    const PAdicScalar zero(Rational(0), 7, 3);
    CHECK(zero.is_zero());
    CHECK(zero.digits().empty());
    CHECK(zero.norm() == 0);

    for (std::int64_t p : {2, 3, 5, 7}) {
        for (int a = -40; a <= 40; ++a) {
            for (int b = 1; b <= 30; ++b) {
                const PAdicScalar s(Rational(a, b), p, 8);
                if (a == 0) continue;
                CHECK(s.digits().front() != 0);
                for (auto d : s.digits()) CHECK(d < p);
                CHECK(s.norm() == norm(Rational(a, b), p));
            }
        }
    }
}

TEST_CASE("rejects composite primes")
{
    CHECK_THROWS_AS(require_prime(4), InvalidArgument);
    CHECK_THROWS_AS(PAdicScalar(Rational(1), 9, 3), InvalidArgument);
    CHECK(is_prime(2));
    CHECK(is_prime(101));
    CHECK_FALSE(is_prime(1));
}

TEST_CASE("fractional part")
{
    CHECK(fractional_part(Rational(5, 3), 3) == Rational(2, 3));
    CHECK(fractional_part(Rational(1, 2), 3) == 0);
    CHECK(fractional_part(Rational(1, 4), 2) == Rational(1, 4));
    CHECK(fractional_part(Rational(7), 3) == 0);
    // -1/2 in Q_2: {-1/2}_2 = 1/2
    CHECK(fractional_part(Rational(-1, 2), 2) == Rational(1, 2));

    // x - {x}_p is a p-adic integer and {x}_p in [0, 1) with a p-power denominator.
    for (std::int64_t p : {2, 3, 5}) {
        for (int a = -30; a <= 30; ++a) {
            for (int b : {1, 2, 3, 4, 5, 8, 9, 12, 25, 27}) {
                const Rational x(a, b);
                const Rational f = fractional_part(x, p);
                CHECK(f >= 0);
                CHECK(f < 1);
                const Order v = valuation(x - f, p);
                CHECK((v.is_infinite() || v.value() >= 0));
            }
        }
    }
}

TEST_CASE("characters")
{
    CHECK(character(Rational(7), 3) == UnitComplex(Rational(0)));
    const auto w = character(Rational(1, 3), 3).value();
    CHECK(w.real() == doctest::Approx(-0.5));
    CHECK(w.imag() == doctest::Approx(std::sqrt(3.0) / 2));
    const auto m = character(Rational(1, 2), 2).value();
    CHECK(m.real() == doctest::Approx(-1.0));
    CHECK(std::abs(m.imag()) < 1e-15);

    // additivity chi(x + y) = chi(x) chi(y)
    for (int a = -12; a <= 12; ++a)
        for (int b = -12; b <= 12; ++b) {
            const Rational x(a, 8), y(b, 4);
            CHECK(character(x + y, 2) == character(x, 2) * character(y, 2));
        }
}

TEST_CASE("pairing")
{
    const PAdicVector zero(2, {Rational(0), Rational(0)});
    const PAdicVector x(2, {Rational(1, 3), Rational(5, 4)});
    CHECK(pairing(zero, x) == UnitComplex());

    const PAdicVector xi(2, {Rational(1, 2), Rational(0)});
    const PAdicVector one(2, {Rational(1), Rational(0)});
    CHECK(pairing(xi, one).value().real() == doctest::Approx(-1.0));

    const PAdicVector integral(3, {Rational(3), Rational(1, 3)});
    const PAdicVector y(3, {Rational(1, 3), Rational(9)});
    CHECK(pairing(integral, y) == UnitComplex());

    CHECK_THROWS_AS(pairing(PAdicVector(2, {Rational(1)}), one), DimensionMismatch);
}

TEST_CASE("ball volume")
{
    CHECK(ball_volume(0, 3, 7) == 1);
    CHECK(ball_volume(-2, 1, 2) == Rational(1, 4));
    CHECK(ball_volume(1, 2, 3) == 9);
}
