#pragma once

// Elliptic symbols, heat kernels and the radial kernel catalogue
// (Riesz kernels, Bessel potentials).

#include <optional>
#include <vector>

#include "ultraheat/lattice.hpp"
#include "ultraheat/measure.hpp"

namespace ultraheat {

struct Monomial
{
    std::vector<int> exponents;
    std::int64_t coefficient = 1;
};

struct EllipticBounds
{
    Rational c0; ///< min of |a(xi)|_p over the unit shell
    Rational c1; ///< max of |a(xi)|_p over the unit shell
};

/// Homogeneous integer polynomial a(xi) of degree d together with the
/// exponent beta of the operator symbol |a(xi)|_p^beta.
class EllipticSymbol
{
public:
    /// Throws NotHomogeneous when the monomial degrees differ.
    EllipticSymbol(std::int64_t p, int dimension, std::vector<Monomial> terms, double beta);

    /// a(xi) = xi_1 in dimension 1.
    static EllipticSymbol linear(std::int64_t p, double beta);
    /// a(xi) = xi_1^2 + ... + xi_N^2.
    static EllipticSymbol sum_of_squares(std::int64_t p, int dimension, double beta);

    std::int64_t prime() const { return p_; }
    int dimension() const { return dimension_; }
    int degree() const { return degree_; }
    double beta() const { return beta_; }
    double d_beta() const { return degree_ * beta_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    const std::optional<EllipticBounds>& bounds() const { return bounds_; }
    EllipticSymbol with_bounds(EllipticBounds b) const;

    BigInt evaluate(std::span<const std::int64_t> k) const;

private:
    std::int64_t p_;
    int dimension_;
    std::vector<Monomial> terms_;
    int degree_ = 0;
    double beta_;
    std::optional<EllipticBounds> bounds_;
};

/// Evaluates |a|_p exactly on every unit-shell representative at the lattice's
/// working precision (M + m digits). Throws NotElliptic when some value has
/// valuation at or beyond that precision.
EllipticBounds check_elliptic(const EllipticSymbol& symbol, const Lattice& lattice);

/// |a(xi)|_p^beta on the frequency side; 0 at the origin cell. Throws
/// PrecisionOverflow when a cell's valuation cannot be certified.
LatticeField symbol_field(const EllipticSymbol& symbol, const LatticePtr& lattice);

struct HeatKernelField
{
    double t = 0;
    LatticeField kernel;     ///< Gamma(t, .) on the position side
    LatticeField multiplier; ///< exp(-t |a(xi)|^beta) on the frequency side
    /// Upper bound on the mass of Gamma(t, .) outside B_M.
    double tail_mass_bound = 0;
    bool tail_warning = false;
};

inline constexpr double default_tail_epsilon = 1e-8;

HeatKernelField heat_kernel(const EllipticSymbol& symbol, double t, const LatticePtr& lattice,
                            double tail_epsilon = default_tail_epsilon);

/// Same as above with a precomputed symbol field.
HeatKernelField heat_kernel(const LatticeField& symbol_values, const EllipticSymbol& symbol, double t,
                            double tail_epsilon = default_tail_epsilon);

struct SeriesValue
{
    double value;
    double tail_bound;
};

/// Gamma(t, x) at ||x||_p = p^-n for the symbol ||xi||_p^exponent in dimension N,
/// by summing the shell integrals of chi_p over frequency shells gamma <= n + 1.
/// Terms gamma = n, ..., n - depth are kept.
SeriesValue radial_heat_series(std::int64_t p, int dimension, double exponent, double t, int n, int depth);
/// One-dimensional form for a(xi) = xi.
SeriesValue radial_heat_series(std::int64_t p, double beta, double t, int n, int depth);

/// Mean of Gamma(t, .) over the ball ||x||_p <= p^-n.
SeriesValue radial_heat_ball_average(std::int64_t p, int dimension, double exponent, double t, int n, int depth);

/// (1 - p^-alpha) / (1 - p^(alpha - N)).
double riesz_constant(double alpha, std::int64_t p, int dimension);

struct RadialKernel
{
    LatticeField field;
    bool origin_singular = false;
    SpectralMeasure measure;
};

/// R_alpha(x) = riesz_constant * ||x||^(alpha - N); the origin cell holds the
/// value at radius p^-m.
RadialKernel riesz_kernel(double alpha, const LatticePtr& lattice);

/// K_alpha(p^gamma) for gamma <= 0 (zero outside the unit ball).
double bessel_value(double alpha, std::int64_t p, int dimension, int gamma);
/// Mean of K_alpha over the ball ||x||_p <= p^gamma.
double bessel_ball_average(double alpha, std::int64_t p, int dimension, int gamma);

/// Bessel potential on the position side; the origin cell holds the exact
/// mean over B_{-m}.
LatticeField bessel_potential(double alpha, const LatticePtr& lattice);

struct KernelBoundFit
{
    double constant; ///< smallest A with Gamma <= A t (t^(1/d beta) + ||x||)^(-d beta - N)
};

KernelBoundFit fit_decay_constant(const HeatKernelField& kernel, double d_beta);

} // namespace ultraheat
