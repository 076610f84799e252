#include "ultraheat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ultraheat/transform.hpp"

namespace ultraheat {

namespace {

bool same_alpha(double a, double b)
{
    return std::abs(a - b) < 1e-12;
}

using Int128 = __int128;

Int128 int128_pow(std::int64_t base, int e)
{
    Int128 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// v_p of a nonzero 128-bit integer.
long valuation128(Int128 x, std::int64_t p)
{
    long v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

} // namespace

EllipticSymbol::EllipticSymbol(std::int64_t p, int dimension, std::vector<Monomial> terms, double beta)
    : p_(p), dimension_(dimension), terms_(std::move(terms)), beta_(beta)
{
    require_prime(p);
    if (dimension < 1) throw InvalidArgument("symbol dimension must be >= 1");
    if (!(beta > 0)) throw InvalidArgument("symbol exponent beta must be positive");
    std::erase_if(terms_, [](const Monomial& m) { return m.coefficient == 0; });
    if (terms_.empty()) throw InvalidArgument("symbol polynomial is zero");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& m = terms_[i];
        if (static_cast<int>(m.exponents.size()) != dimension)
            throw DimensionMismatch("monomial exponent vector has wrong length");
        int deg = 0;
        for (int e : m.exponents) {
            if (e < 0) throw InvalidArgument("negative monomial exponent");
            deg += e;
        }
        if (i == 0) {
            degree_ = deg;
        } else if (deg != degree_) {
            throw NotHomogeneous("monomial degrees " + std::to_string(degree_) + " and " + std::to_string(deg) +
                                 " differ");
        }
    }
    if (degree_ == 0) throw NotHomogeneous("constant polynomial is not elliptic");
}

EllipticSymbol EllipticSymbol::linear(std::int64_t p, double beta)
{
    return EllipticSymbol(p, 1, {Monomial{{1}, 1}}, beta);
}

EllipticSymbol EllipticSymbol::sum_of_squares(std::int64_t p, int dimension, double beta)
{
    std::vector<Monomial> terms;
    for (int i = 0; i < dimension; ++i) {
        Monomial m{std::vector<int>(static_cast<std::size_t>(dimension), 0), 1};
        m.exponents[static_cast<std::size_t>(i)] = 2;
        terms.push_back(std::move(m));
    }
    return EllipticSymbol(p, dimension, std::move(terms), beta);
}

EllipticSymbol EllipticSymbol::with_bounds(EllipticBounds b) const
{
    EllipticSymbol s = *this;
    s.bounds_ = std::move(b);
    return s;
}

BigInt EllipticSymbol::evaluate(std::span<const std::int64_t> k) const
{
    if (static_cast<int>(k.size()) != dimension_) throw DimensionMismatch("evaluate: wrong coordinate count");
    BigInt total = 0;
    for (const auto& m : terms_) {
        BigInt term = m.coefficient;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (m.exponents[i]) term *= boost::multiprecision::pow(BigInt(k[i]), static_cast<unsigned>(m.exponents[i]));
        total += term;
    }
    return total;
}

namespace {

// Evaluates v_p(a(j)) for integer j with |j_i| < bound, using 128-bit
// arithmetic when the result provably fits. Returns nullopt for a(j) = 0.
class SymbolValuator
{
public:
    SymbolValuator(const EllipticSymbol& s, std::int64_t coord_bound) : symbol_(s)
    {
        long double bits = 0;
        long double coeffs = 0;
        for (const auto& m : s.terms()) coeffs += std::abs(static_cast<long double>(m.coefficient));
        bits = std::log2(coeffs) + s.degree() * std::log2(static_cast<long double>(std::max<std::int64_t>(coord_bound, 2)));
        fast_ = bits < 120;
    }

    std::optional<long> operator()(std::span<const std::int64_t> j) const
    {
        if (fast_) {
            Int128 total = 0;
            for (const auto& m : symbol_.terms()) {
                Int128 term = m.coefficient;
                for (std::size_t i = 0; i < j.size(); ++i)
                    if (m.exponents[i]) term *= int128_pow(j[i], m.exponents[i]);
                total += term;
            }
            if (total == 0) return std::nullopt;
            return valuation128(total, symbol_.prime());
        }
        const Order v = valuation(symbol_.evaluate(j), symbol_.prime());
        if (v.is_infinite()) return std::nullopt;
        return v.value();
    }

private:
    const EllipticSymbol& symbol_;
    bool fast_;
};

void require_same_space(const EllipticSymbol& s, const Lattice& lattice)
{
    if (s.prime() != lattice.prime() || s.dimension() != lattice.dimension())
        throw DimensionMismatch("symbol and lattice disagree on p or N");
}

} // namespace

EllipticBounds check_elliptic(const EllipticSymbol& symbol, const Lattice& lattice)
{
    require_same_space(symbol, lattice);
    const int precision = lattice.digits();
    const SymbolValuator valuator(symbol, lattice.axis_length());
    std::vector<std::int64_t> k(static_cast<std::size_t>(lattice.dimension()));
    long vmin = std::numeric_limits<long>::max(), vmax = -1;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        if (lattice.depth(i) != 0) continue;
        lattice.coords(i, k);
        const auto v = valuator(k);
        if (!v || *v >= precision) {
            std::string where;
            for (auto c : k) where += (where.empty() ? "" : ",") + std::to_string(c);
            throw NotElliptic("|a| vanishes to working precision " + std::to_string(precision) +
                              " on the unit shell at (" + where + ")");
        }
        vmin = std::min(vmin, *v);
        vmax = std::max(vmax, *v);
    }
    if (vmax < 0) throw NotElliptic("lattice has no unit-shell points");
    return {rational_power(symbol.prime(), -vmax), rational_power(symbol.prime(), -vmin)};
}

LatticeField symbol_field(const EllipticSymbol& symbol, const LatticePtr& lattice)
{
    require_same_space(symbol, *lattice);
    const int digits = lattice->digits();
    const int m = lattice->resolution_exponent();
    const int d = symbol.degree();
    const double p = static_cast<double>(symbol.prime());
    const SymbolValuator valuator(symbol, lattice->axis_length());

    LatticeField out(lattice, Side::frequency);
    std::vector<std::int64_t> k(static_cast<std::size_t>(lattice->dimension()));
    for (std::size_t i = 0; i < lattice->size(); ++i) {
        const int s = lattice->depth(i);
        if (s == digits) {
            out[i] = 0.0;
            continue;
        }
        lattice->coords(i, k);
        std::int64_t scale = 1;
        for (int e = 0; e < s; ++e) scale *= symbol.prime();
        for (auto& c : k) c /= scale;
        // The unit part j is known modulo p^(digits - s).
        const auto v = valuator(k);
        if (!v || *v >= digits - s)
            throw PrecisionOverflow("valuation of a(xi) at cell " + std::to_string(i) +
                                    " exceeds the lattice digit budget; raise M + m");
        const long order = -static_cast<long>(m) * d + static_cast<long>(d) * s + *v;
        out[i] = std::pow(p, -symbol.beta() * static_cast<double>(order));
    }
    return out;
}

HeatKernelField heat_kernel(const EllipticSymbol& symbol, double t, const LatticePtr& lattice, double tail_epsilon)
{
    return heat_kernel(symbol_field(symbol, lattice), symbol, t, tail_epsilon);
}

HeatKernelField heat_kernel(const LatticeField& symbol_values, const EllipticSymbol& symbol, double t,
                            double tail_epsilon)
{
    if (!(t >= 0)) throw InvalidArgument("heat kernel needs t >= 0");
    const LatticePtr& lattice = symbol_values.lattice_ptr();
    const double p = static_cast<double>(lattice->prime());
    const int n = lattice->dimension();

    LatticeField multiplier(lattice, Side::frequency);
    for (std::size_t i = 0; i < multiplier.size(); ++i) multiplier[i] = std::exp(-t * symbol_values[i].real());

    LatticeField kernel(lattice, Side::position);
    if (t == 0) {
        kernel[0] = std::pow(p, lattice->resolution_exponent() * n);
    } else {
        kernel = inverse(multiplier);
        // Gamma is real by symmetry of |a|; drop rounding residue.
        for (auto& v : kernel.values()) v = v.real();
    }

    double c1 = 0;
    if (symbol.bounds()) {
        c1 = to_double(symbol.bounds()->c1);
    } else {
        for (std::size_t i = 0; i < symbol_values.size(); ++i) {
            const auto g = lattice->norm_exponent(i, Side::frequency);
            if (!g) continue;
            const double a = std::pow(symbol_values[i].real(), 1.0 / symbol.beta());
            c1 = std::max(c1, a / std::pow(p, static_cast<double>(*g) * symbol.degree()));
        }
    }
    // 1 - e^-x <= x and |a| <= C1 ||xi||^d on B_{-M}.
    const double db = symbol.d_beta();
    const int big_m = lattice->support_exponent();
    const double bound = t * std::pow(c1, symbol.beta()) * (1 - std::pow(p, -n)) * std::pow(p, -big_m * db) /
                         (1 - std::pow(p, -(n + db)));

    HeatKernelField out{t, std::move(kernel), std::move(multiplier), bound, bound > tail_epsilon};
    return out;
}

SeriesValue radial_heat_series(std::int64_t p, int dimension, double exponent, double t, int n, int depth)
{
    if (!(t > 0)) throw InvalidArgument("radial_heat_series needs t > 0");
    if (depth < 1) throw InvalidArgument("radial_heat_series needs depth >= 1");
    const double pd = static_cast<double>(p);
    const double shell = 1 - std::pow(pd, -dimension);
    double sum = 0;
    const double lp = std::log(pd);
    for (int g = n - depth; g <= n; ++g)
        sum += shell * std::exp(g * dimension * lp - t * std::pow(pd, g * exponent));
    sum -= std::exp(n * dimension * lp - t * std::pow(pd, (n + 1) * exponent));
    return {sum, std::pow(pd, static_cast<double>(n - depth - 1) * dimension)};
}

SeriesValue radial_heat_series(std::int64_t p, double beta, double t, int n, int depth)
{
    return radial_heat_series(p, 1, beta, t, n, depth);
}

SeriesValue radial_heat_ball_average(std::int64_t p, int dimension, double exponent, double t, int n, int depth)
{
    const double pd = static_cast<double>(p);
    const double shell = 1 - std::pow(pd, -dimension);
    const double lp = std::log(pd);
    double sum = 0;
    for (int g = n - depth; g <= n; ++g) sum += shell * std::exp(g * dimension * lp - t * std::pow(pd, g * exponent));
    return {sum, std::pow(pd, static_cast<double>(n - depth - 1) * dimension)};
}

double riesz_constant(double alpha, std::int64_t p, int dimension)
{
    const double pd = static_cast<double>(p);
    return (1 - std::pow(pd, -alpha)) / (1 - std::pow(pd, alpha - dimension));
}

RadialKernel riesz_kernel(double alpha, const LatticePtr& lattice)
{
    const int n = lattice->dimension();
    if (!(alpha > 0 && alpha < n)) throw InvalidArgument("Riesz kernel needs 0 < alpha < N");
    const double pd = static_cast<double>(lattice->prime());
    const double c = riesz_constant(alpha, lattice->prime(), n);
    const int innermost = -lattice->resolution_exponent();
    auto field = sample_radial(lattice, Side::position, [&](std::optional<int> g) {
        return c * std::pow(pd, g.value_or(innermost) * (alpha - n));
    });
    return {std::move(field), true, SpectralMeasure::riesz(lattice->prime(), n, alpha)};
}

double bessel_value(double alpha, std::int64_t p, int dimension, int gamma)
{
    if (gamma > 0) return 0.0;
    const double pd = static_cast<double>(p);
    if (same_alpha(alpha, dimension)) return (1 - std::pow(pd, -dimension)) * (1 - gamma);
    return riesz_constant(alpha, p, dimension) * (std::pow(pd, gamma * (alpha - dimension)) - std::pow(pd, alpha - dimension));
}

double bessel_ball_average(double alpha, std::int64_t p, int dimension, int gamma)
{
    const double pd = static_cast<double>(p);
    const double n = dimension;
    const int g0 = std::min(gamma, 0);
    double integral;
    if (same_alpha(alpha, dimension)) {
        const double r = std::pow(pd, -n);
        const double j0 = -g0;
        integral = (1 - r) * (std::pow(r, j0) * (1 + j0) + std::pow(r, j0 + 1) / (1 - r));
    } else {
        integral = riesz_constant(alpha, p, dimension) *
                   ((1 - std::pow(pd, -n)) * std::pow(pd, g0 * alpha) / (1 - std::pow(pd, -alpha)) -
                    std::pow(pd, alpha - n) * std::pow(pd, g0 * n));
    }
    return integral * std::pow(pd, -gamma * n);
}

LatticeField bessel_potential(double alpha, const LatticePtr& lattice)
{
    if (!(alpha > 0)) throw InvalidArgument("Bessel potential needs alpha > 0");
    const auto p = lattice->prime();
    const int n = lattice->dimension();
    const int m = lattice->resolution_exponent();
    return sample_radial(lattice, Side::position, [&](std::optional<int> g) {
        return g ? bessel_value(alpha, p, n, *g) : bessel_ball_average(alpha, p, n, -m);
    });
}

KernelBoundFit fit_decay_constant(const HeatKernelField& kernel, double d_beta)
{
    if (!(kernel.t > 0)) throw InvalidArgument("decay fit needs t > 0");
    const Lattice& lattice = kernel.kernel.lattice();
    const double pd = static_cast<double>(lattice.prime());
    const int n = lattice.dimension();
    const double scale = std::pow(kernel.t, 1.0 / d_beta);
    double best = 0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto g = lattice.norm_exponent(i, Side::position);
        const double r = g ? std::pow(pd, *g) : 0.0;
        const double envelope = kernel.t * std::pow(scale + r, -d_beta - n);
        best = std::max(best, kernel.kernel[i].real() / envelope);
    }
    return {best};
}

} // namespace ultraheat
