#include "ultraheat/padic.hpp"

#include <cmath>
#include <numbers>

namespace ultraheat {

bool is_prime(std::int64_t n)
{
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void require_prime(std::int64_t p)
{
    if (!is_prime(p)) throw InvalidArgument("p = " + std::to_string(p) + " is not prime");
}

long Order::value() const
{
    if (infinite_) throw InvalidArgument("order of zero is infinite");
    return value_;
}

std::string Order::str() const
{
    return infinite_ ? std::string("inf") : std::to_string(value_);
}

Order min(const Order& a, const Order& b)
{
    return b < a ? b : a;
}

Order valuation(const BigInt& n, std::int64_t p)
{
    if (n == 0) return Order::infinity();
    BigInt q = n;
    long v = 0;
    const BigInt bp = p;
    while (q % bp == 0) {
        q /= bp;
        ++v;
    }
    return Order(v);
}

Order valuation(const Rational& x, std::int64_t p)
{
    if (x == 0) return Order::infinity();
    return Order(valuation(numerator(x), p).value() - valuation(denominator(x), p).value());
}

BigInt int_power(std::int64_t p, unsigned e)
{
    return boost::multiprecision::pow(BigInt(p), e);
}

Rational rational_power(std::int64_t p, long e)
{
    if (e >= 0) return Rational(int_power(p, static_cast<unsigned>(e)));
    return Rational(BigInt(1), int_power(p, static_cast<unsigned>(-e)));
}

Rational norm(const Rational& x, std::int64_t p)
{
    const Order v = valuation(x, p);
    if (v.is_infinite()) return Rational(0);
    return rational_power(p, -v.value());
}

BigInt mod_inverse(const BigInt& a, const BigInt& m)
{
    BigInt old_r = ((a % m) + m) % m, r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) throw InvalidArgument("mod_inverse: arguments are not coprime");
    return ((old_s % m) + m) % m;
}

namespace {

// Splits x = p^v * u / w with u, w prime to p. x must be nonzero.
struct UnitSplit
{
    long order;
    BigInt unit_num;
    BigInt unit_den;
};

UnitSplit split_unit(const Rational& x, std::int64_t p)
{
    BigInt num = numerator(x), den = denominator(x);
    long v = 0;
    const BigInt bp = p;
    while (num % bp == 0) {
        num /= bp;
        ++v;
    }
    while (den % bp == 0) {
        den /= bp;
        --v;
    }
    return {v, num, den};
}

// u / w modulo p^k, in [0, p^k).
BigInt unit_residue(const UnitSplit& s, std::int64_t p, unsigned k)
{
    const BigInt modulus = int_power(p, k);
    const BigInt num = ((s.unit_num % modulus) + modulus) % modulus;
    return (num * mod_inverse(s.unit_den, modulus)) % modulus;
}

} // namespace

PAdicScalar::PAdicScalar(const Rational& x, std::int64_t p, unsigned precision)
    : p_(p), order_(Order::infinity()), precision_(precision)
{
    require_prime(p);
    if (precision == 0) throw InvalidArgument("PAdicScalar precision must be positive");
    if (x == 0) return;
    const UnitSplit s = split_unit(x, p);
    order_ = Order(s.order);
    BigInt r = unit_residue(s, p, precision);
    digits_.reserve(precision);
    for (unsigned i = 0; i < precision; ++i) {
        digits_.push_back(static_cast<std::uint32_t>(r % p));
        r /= p;
    }
}

Rational PAdicScalar::norm() const
{
    if (is_zero()) return Rational(0);
    return rational_power(p_, -order_.value());
}

PAdicVector::PAdicVector(std::int64_t p, std::vector<Rational> coords) : p_(p), coords_(std::move(coords))
{
    require_prime(p);
    if (coords_.empty()) throw InvalidArgument("PAdicVector needs at least one component");
}

Rational PAdicVector::norm() const
{
    Rational best = 0;
    for (const auto& c : coords_) best = std::max(best, ultraheat::norm(c, p_));
    return best;
}

Order PAdicVector::order() const
{
    Order best = Order::infinity();
    for (const auto& c : coords_) best = min(best, valuation(c, p_));
    return best;
}

PAdicScalar PAdicVector::component(std::size_t i, unsigned precision) const
{
    return PAdicScalar(coords_.at(i), p_, precision);
}

Rational reduce_phase(const Rational& q)
{
    const BigInt num = numerator(q), den = denominator(q);
    BigInt r = num % den;
    if (r < 0) r += den;
    return Rational(r, den);
}

UnitComplex::UnitComplex(const Rational& phase) : phase_(reduce_phase(phase)) {}

std::complex<double> UnitComplex::value() const
{
    // Reduce to the nearest integer multiple first so the angle stays in [-pi, pi].
    Rational q = phase_;
    if (q > Rational(1, 2)) q -= 1;
    const long double angle = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(q);
    return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

UnitComplex UnitComplex::conj() const
{
    return UnitComplex(-phase_);
}

UnitComplex operator*(const UnitComplex& a, const UnitComplex& b)
{
    return UnitComplex(a.phase_ + b.phase_);
}

Rational fractional_part(const Rational& x, std::int64_t p)
{
    require_prime(p);
    if (x == 0) return Rational(0);
    const UnitSplit s = split_unit(x, p);
    if (s.order >= 0) return Rational(0);
    const auto k = static_cast<unsigned>(-s.order);
    return Rational(unit_residue(s, p, k), int_power(p, k));
}

UnitComplex character(const Rational& y, std::int64_t p)
{
    return UnitComplex(fractional_part(y, p));
}

UnitComplex pairing(const PAdicVector& xi, const PAdicVector& x)
{
    if (xi.prime() != x.prime()) throw DimensionMismatch("pairing: primes differ");
    if (xi.dimension() != x.dimension()) throw DimensionMismatch("pairing: dimensions differ");
    Rational dot = 0;
    for (std::size_t i = 0; i < x.dimension(); ++i) dot += xi[i] * x[i];
    return character(-dot, x.prime());
}

Rational ball_volume(long gamma, int dimension, std::int64_t p)
{
    return rational_power(p, gamma * dimension);
}

double to_double(const Rational& q)
{
    return static_cast<double>(q);
}

} // namespace ultraheat
