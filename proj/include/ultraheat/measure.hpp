#pragma once

// Spectral measure descriptors.
//
// Radial measures are given by a closed-form density g(||xi||_p); the mass of
// the shell ||xi||_p = p^gamma is g(p^gamma) p^(gamma N) (1 - p^-N). Atomic
// measures are a finite list of point masses.

#include <optional>
#include <string>
#include <vector>

#include "ultraheat/lattice.hpp"
#include "ultraheat/padic.hpp"

namespace ultraheat {

enum class MeasureKind {
    white,  ///< density 1 (Haar measure)
    power,  ///< ||xi||^-alpha, 0 < alpha < N (Riesz spectral density)
    bessel, ///< max(1, ||xi||)^-alpha
    heat,   ///< exp(-||xi||^beta)
    atoms,
};

const char* to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& name);

struct Atom
{
    PAdicVector xi;
    double mass;
};

class SpectralMeasure
{
public:
    static SpectralMeasure white(std::int64_t p, int dimension);
    static SpectralMeasure riesz(std::int64_t p, int dimension, double alpha);
    static SpectralMeasure bessel(std::int64_t p, int dimension, double alpha);
    static SpectralMeasure heat(std::int64_t p, int dimension, double beta);
    static SpectralMeasure atomic(std::int64_t p, int dimension, std::vector<Atom> atoms);

    /// Copy restricted to ||xi||_p <= p^exponent.
    SpectralMeasure truncated(int exponent) const;

    MeasureKind kind() const { return kind_; }
    std::int64_t prime() const { return p_; }
    int dimension() const { return dimension_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::optional<int>& truncation() const { return truncation_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool is_radial() const { return kind_ != MeasureKind::atoms; }

    /// g(p^gamma), including the truncation cutoff.
    double density(int gamma) const;

    std::string describe() const;

private:
    SpectralMeasure(MeasureKind kind, std::int64_t p, int dimension);

    MeasureKind kind_;
    std::int64_t p_;
    int dimension_;
    double alpha_ = 0;
    double beta_ = 0;
    std::optional<int> truncation_;
    std::vector<Atom> atoms_;
};

/// g(p^gamma) p^(gamma N) (1 - p^-N). Throws UseAtoms for atomic measures.
double shell_mass(const SpectralMeasure& mu, int gamma);

/// mu(||xi||_p <= p^gamma), from closed forms (numerical series for heat).
double ball_mass(const SpectralMeasure& mu, int gamma);

/// Masses of the frequency-side cells of a lattice. Nonzero cells get
/// density * cell volume; the origin cell gets the exact mass of B_{-M}.
std::vector<double> cell_masses(const SpectralMeasure& mu, const Lattice& lattice);

} // namespace ultraheat
