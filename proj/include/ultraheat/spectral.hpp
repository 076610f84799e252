#pragma once

// Integrability criteria for spectral measures.
//
// Divergence is a value: an IntegralReport without a value is DIVERGENT and
// carries the geometric ratio that witnesses it.

#include <optional>
#include <string>

#include "ultraheat/lattice.hpp"
#include "ultraheat/measure.hpp"

namespace ultraheat {

struct IntegralReport
{
    std::optional<double> value; ///< nullopt means DIVERGENT
    int truncation = 0;          ///< shells |gamma| <= truncation were summed explicitly
    double tail = 0;             ///< analytic tail added (or bounded) beyond the window
    double ratio = 0;            ///< worst geometric tail ratio; >= 1 iff divergent
    std::string method;

    bool divergent() const { return !value.has_value(); }
    bool converged() const { return value.has_value(); }
};

inline constexpr int default_shell_window = 40;

/// Integral of d mu(xi) / max(1, ||xi||_p)^d_beta.
IntegralReport weighted_integral_dbeta(const SpectralMeasure& mu, double d_beta,
                                       int window = default_shell_window);

/// Integral of ||xi||_p^d_beta d mu(xi).
IntegralReport moment_integral(const SpectralMeasure& mu, double d_beta, int window = default_shell_window);

/// Radial correlation kernel f on ||x||_p <= 1, the position-side partner of
/// a spectral measure.
struct KernelDescriptor
{
    enum class Kind { riesz, bessel, heat, constant };

    Kind kind;
    std::int64_t p;
    int dimension;
    double parameter = 0; ///< alpha for riesz/bessel, beta for heat, the value for constant

    static KernelDescriptor riesz(std::int64_t p, int dimension, double alpha);
    static KernelDescriptor bessel(std::int64_t p, int dimension, double alpha);
    static KernelDescriptor heat(std::int64_t p, int dimension, double beta);
    static KernelDescriptor constant(std::int64_t p, int dimension, double value);

    /// f(p^gamma) for gamma <= 0.
    double value(int gamma) const;
    std::string describe() const;
};

/// The kernel whose Fourier transform is mu. Throws InvalidArgument for
/// white, truncated and atomic measures, which have no function partner.
KernelDescriptor paired_kernel(const SpectralMeasure& mu);

/// Integral over ||x||_p <= 1 of f(x) K_{d beta}(x), i.e. the right-hand side
/// of the position-space integrability criterion.
IntegralReport position_side_integral(const KernelDescriptor& f, double d_beta, int window = default_shell_window);

struct EquivalenceReport
{
    std::string pair;
    double d_beta = 0;
    IntegralReport spectral;
    IntegralReport position;
    std::optional<double> lattice_quadrature;
    std::optional<LatticeParams> quadrature_lattice;
    double relative_gap = 0;         ///< |spectral - position| / spectral
    double lattice_relative_gap = 0; ///< |spectral - quadrature| / spectral
    bool verdicts_agree = false;
};

/// Evaluates both sides of the criterion for a matched (f, mu) pair; the
/// lattice route integrates f * K_{d beta} on a position lattice with M = 0
/// and at most `quadrature_cells` cells.
EquivalenceReport check_equivalence(const SpectralMeasure& mu, double d_beta,
                                    std::size_t quadrature_cells = std::size_t{1} << 20);

/// Position-side field of the kernel paired with mu.
LatticeField kernel_field(const SpectralMeasure& mu, const LatticePtr& lattice);

} // namespace ultraheat
