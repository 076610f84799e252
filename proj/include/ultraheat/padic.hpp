#pragma once

// Exact arithmetic primitives of Q_p and Q_p^N.
//
// Values enter as exact rationals; valuations, norms, fractional parts and
// character phases are computed without rounding. Floating point only
// appears when a UnitComplex is converted to std::complex<double>.

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ultraheat/errors.hpp"

namespace ultraheat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

bool is_prime(std::int64_t n);

/// Throws InvalidArgument unless p is a prime.
void require_prime(std::int64_t p);

/// p-adic order: an integer, or infinity for zero.
class Order
{
public:
    constexpr explicit Order(long value) : value_(value), infinite_(false) {}

    static constexpr Order infinity() { return Order(); }

    constexpr bool is_infinite() const { return infinite_; }

    /// Finite value; throws InvalidArgument for infinity.
    long value() const;

    friend constexpr bool operator==(const Order& a, const Order& b)
    {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend constexpr bool operator<(const Order& a, const Order& b)
    {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }

    std::string str() const;

private:
    constexpr Order() : value_(0), infinite_(true) {}

    long value_;
    bool infinite_;
};

Order min(const Order& a, const Order& b);

/// Exponent of p in a nonzero integer; infinity for zero.
Order valuation(const BigInt& n, std::int64_t p);
Order valuation(const Rational& x, std::int64_t p);

/// |x|_p = p^(-ord x), exactly; 0 for x = 0.
Rational norm(const Rational& x, std::int64_t p);

/// p^e as an exact rational (e may be negative).
Rational rational_power(std::int64_t p, long e);

BigInt int_power(std::int64_t p, unsigned e);

/// Inverse of a modulo m; a and m must be coprime.
BigInt mod_inverse(const BigInt& a, const BigInt& m);

/// A nonzero element of Q_p stored as p^ord * (d_0 + d_1 p + ... + d_{K-1} p^{K-1}),
/// with d_0 != 0, truncated to K digits. Zero has infinite order and no digits.
class PAdicScalar
{
public:
    PAdicScalar(const Rational& x, std::int64_t p, unsigned precision);

    std::int64_t prime() const { return p_; }
    const Order& order() const { return order_; }
    unsigned precision() const { return precision_; }
    /// Base-p digits of the unit part, least significant first.
    const std::vector<std::uint32_t>& digits() const { return digits_; }
    bool is_zero() const { return order_.is_infinite(); }

    Rational norm() const;

private:
    std::int64_t p_;
    Order order_;
    unsigned precision_;
    std::vector<std::uint32_t> digits_;
};

/// Exact element of Q_p^N.
class PAdicVector
{
public:
    PAdicVector(std::int64_t p, std::vector<Rational> coords);

    std::int64_t prime() const { return p_; }
    std::size_t dimension() const { return coords_.size(); }
    const std::vector<Rational>& coords() const { return coords_; }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }

    /// ||x||_p = max_i |x_i|_p.
    Rational norm() const;
    /// ord(x) = min_i ord(x_i).
    Order order() const;

    PAdicScalar component(std::size_t i, unsigned precision) const;

private:
    std::int64_t p_;
    std::vector<Rational> coords_;
};

/// exp(2 pi i q) for an exact rational phase q in [0, 1).
class UnitComplex
{
public:
    UnitComplex() = default;
    explicit UnitComplex(const Rational& phase);

    const Rational& phase() const { return phase_; }
    std::complex<double> value() const;
    UnitComplex conj() const;

    friend UnitComplex operator*(const UnitComplex& a, const UnitComplex& b);
    friend bool operator==(const UnitComplex& a, const UnitComplex& b) = default;

private:
    Rational phase_{0};
};

/// Reduces q modulo 1 into [0, 1).
Rational reduce_phase(const Rational& q);

/// {x}_p: the polar part of the p-adic expansion of x, a rational in [0, 1)
/// whose denominator is p^(-ord x) when ord x < 0.
Rational fractional_part(const Rational& x, std::int64_t p);

/// chi_p(y) = exp(2 pi i {y}_p).
UnitComplex character(const Rational& y, std::int64_t p);

/// chi_p(-xi . x).
UnitComplex pairing(const PAdicVector& xi, const PAdicVector& x);

/// Haar volume p^(gamma N) of the ball of radius p^gamma in Q_p^N.
Rational ball_volume(long gamma, int dimension, std::int64_t p);

double to_double(const Rational& q);

} // namespace ultraheat
