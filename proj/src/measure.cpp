#include "ultraheat/measure.hpp"

#include <cmath>
#include <sstream>

namespace ultraheat {

const char* to_string(MeasureKind kind)
{
    switch (kind) {
    case MeasureKind::white: return "white";
    case MeasureKind::power: return "riesz";
    case MeasureKind::bessel: return "bessel";
    case MeasureKind::heat: return "heat";
    case MeasureKind::atoms: return "atoms";
    }
    return "?";
}

MeasureKind measure_kind_from_string(const std::string& name)
{
    if (name == "white") return MeasureKind::white;
    if (name == "riesz" || name == "power") return MeasureKind::power;
    if (name == "bessel") return MeasureKind::bessel;
    if (name == "heat") return MeasureKind::heat;
    if (name == "atoms") return MeasureKind::atoms;
    throw InvalidArgument("unknown measure kind '" + name + "'");
}

SpectralMeasure::SpectralMeasure(MeasureKind kind, std::int64_t p, int dimension)
    : kind_(kind), p_(p), dimension_(dimension)
{
    require_prime(p);
    if (dimension < 1) throw InvalidArgument("measure dimension must be >= 1");
}

SpectralMeasure SpectralMeasure::white(std::int64_t p, int dimension)
{
    return SpectralMeasure(MeasureKind::white, p, dimension);
}

SpectralMeasure SpectralMeasure::riesz(std::int64_t p, int dimension, double alpha)
{
    if (!(alpha > 0 && alpha < dimension)) throw InvalidArgument("Riesz measure needs 0 < alpha < N");
    SpectralMeasure mu(MeasureKind::power, p, dimension);
    mu.alpha_ = alpha;
    return mu;
}

SpectralMeasure SpectralMeasure::bessel(std::int64_t p, int dimension, double alpha)
{
    if (!(alpha > 0)) throw InvalidArgument("Bessel measure needs alpha > 0");
    SpectralMeasure mu(MeasureKind::bessel, p, dimension);
    mu.alpha_ = alpha;
    return mu;
}

SpectralMeasure SpectralMeasure::heat(std::int64_t p, int dimension, double beta)
{
    if (!(beta > 0)) throw InvalidArgument("heat measure needs beta > 0");
    SpectralMeasure mu(MeasureKind::heat, p, dimension);
    mu.beta_ = beta;
    return mu;
}

SpectralMeasure SpectralMeasure::atomic(std::int64_t p, int dimension, std::vector<Atom> atoms)
{
    SpectralMeasure mu(MeasureKind::atoms, p, dimension);
    for (const auto& a : atoms) {
        if (a.mass < 0) throw InvalidArgument("atom masses must be nonnegative");
        if (a.xi.prime() != p || static_cast<int>(a.xi.dimension()) != dimension)
            throw DimensionMismatch("atom location does not match the measure's prime/dimension");
    }
    mu.atoms_ = std::move(atoms);
    return mu;
}

SpectralMeasure SpectralMeasure::truncated(int exponent) const
{
    if (kind_ == MeasureKind::atoms) throw UseAtoms("truncate an atomic measure by editing its atoms");
    SpectralMeasure mu = *this;
    mu.truncation_ = truncation_ ? std::min(*truncation_, exponent) : exponent;
    return mu;
}

double SpectralMeasure::density(int gamma) const
{
    if (truncation_ && gamma > *truncation_) return 0.0;
    const double r = std::pow(static_cast<double>(p_), gamma);
    switch (kind_) {
    case MeasureKind::white: return 1.0;
    case MeasureKind::power: return std::pow(r, -alpha_);
    case MeasureKind::bessel: return gamma <= 0 ? 1.0 : std::pow(r, -alpha_);
    case MeasureKind::heat: return std::exp(-std::pow(r, beta_));
    case MeasureKind::atoms: throw UseAtoms("atomic measure has no density");
    }
    return 0.0;
}

std::string SpectralMeasure::describe() const
{
    std::ostringstream os;
    os << to_string(kind_) << "(p=" << p_ << ", N=" << dimension_;
    if (kind_ == MeasureKind::power || kind_ == MeasureKind::bessel) os << ", alpha=" << alpha_;
    if (kind_ == MeasureKind::heat) os << ", beta=" << beta_;
    if (kind_ == MeasureKind::atoms) os << ", atoms=" << atoms_.size();
    if (truncation_) os << ", truncate=" << *truncation_;
    os << ')';
    return os.str();
}

double shell_mass(const SpectralMeasure& mu, int gamma)
{
    if (!mu.is_radial()) throw UseAtoms("shell_mass is not defined for atomic measures; sum the atoms");
    const double p = static_cast<double>(mu.prime());
    const int n = mu.dimension();
    const double shell = 1.0 - std::pow(p, -n);
    if (mu.kind() == MeasureKind::heat) {
        if (mu.truncation() && gamma > *mu.truncation()) return 0.0;
        // Log space: p^(gamma N) overflows long before exp(-p^(gamma beta)) underflows to zero.
        return shell * std::exp(gamma * n * std::log(p) - std::pow(p, gamma * mu.beta()));
    }
    return mu.density(gamma) * std::pow(p, static_cast<double>(gamma) * n) * shell;
}

double ball_mass(const SpectralMeasure& mu, int gamma)
{
    if (!mu.is_radial()) {
        double total = 0;
        for (const auto& a : mu.atoms()) {
            const auto v = a.xi.order();
            if (v.is_infinite() || -v.value() <= gamma) total += a.mass;
        }
        return total;
    }
    if (mu.truncation()) gamma = std::min(gamma, *mu.truncation());
    const double p = static_cast<double>(mu.prime());
    const double n = mu.dimension();
    const double shell = 1.0 - std::pow(p, -n);
    switch (mu.kind()) {
    case MeasureKind::white: return std::pow(p, gamma * n);
    case MeasureKind::power: {
        const double e = n - mu.alpha();
        return shell * std::pow(p, gamma * e) / (1.0 - std::pow(p, -e));
    }
    case MeasureKind::bessel: {
        if (gamma <= 0) return std::pow(p, gamma * n);
        double total = 1.0;
        for (int g = 1; g <= gamma; ++g) total += shell_mass(mu, g);
        return total;
    }
    case MeasureKind::heat: {
        // Shell masses decay like p^(gamma N) downward; stop once negligible
        // and add the white-noise majorant of the remainder.
        // Shells with p^(gamma beta) > 800 carry no mass in double precision.
        gamma = std::min(gamma, static_cast<int>(std::ceil(std::log(800.0) / (mu.beta() * std::log(p)))));
        double total = 0;
        int g = gamma;
        for (; g > gamma - 2000; --g) {
            const double term = shell_mass(mu, g);
            total += term;
            if (term < 1e-20 * total) break;
        }
        return total + std::pow(p, (g - 1) * n);
    }
    case MeasureKind::atoms: break;
    }
    return 0.0;
}

std::vector<double> cell_masses(const SpectralMeasure& mu, const Lattice& lattice)
{
    if (mu.prime() != lattice.prime() || mu.dimension() != lattice.dimension())
        throw DimensionMismatch("measure and lattice disagree on p or N");
    std::vector<double> masses(lattice.size(), 0.0);
    if (!mu.is_radial()) {
        const Rational scale = rational_power(lattice.prime(), lattice.resolution_exponent());
        std::vector<std::int64_t> k(static_cast<std::size_t>(lattice.dimension()));
        for (const auto& a : mu.atoms()) {
            for (std::size_t i = 0; i < k.size(); ++i) {
                const Rational scaled = a.xi[i] * scale;
                if (denominator(scaled) != 1)
                    throw InvalidArgument("atom location is not a frequency-lattice point");
                const BigInt num = numerator(scaled) % lattice.axis_length();
                k[i] = static_cast<std::int64_t>(num);
            }
            if (a.xi.norm() > rational_power(lattice.prime(), lattice.resolution_exponent()))
                throw InvalidArgument("atom lies outside the frequency lattice support");
            masses[lattice.index_of(k)] += a.mass;
        }
        return masses;
    }
    const double volume = lattice.cell_volume(Side::frequency);
    const int lo = lattice.min_shell(Side::frequency), hi = lattice.max_shell(Side::frequency);
    std::vector<double> by_shell(static_cast<std::size_t>(hi - lo + 1));
    for (int g = lo; g <= hi; ++g) by_shell[static_cast<std::size_t>(g - lo)] = mu.density(g) * volume;
    const double origin = ball_mass(mu, -lattice.support_exponent());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto g = lattice.norm_exponent(i, Side::frequency);
        masses[i] = g ? by_shell[static_cast<std::size_t>(*g - lo)] : origin;
    }
    return masses;
}

} // namespace ultraheat
