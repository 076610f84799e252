#include "ultraheat/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ultraheat/kernels.hpp"
#include "ultraheat/transform.hpp"

namespace ultraheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Weight { dbeta, moment };

double weight(Weight w, double p, int gamma, double d_beta)
{
    if (w == Weight::dbeta) return gamma <= 0 ? 1.0 : std::pow(p, -gamma * d_beta);
    return std::pow(p, gamma * d_beta);
}

// log_p growth of term(gamma) per unit step towards -inf (inner) and +inf (outer).
struct Slopes
{
    double inner;
    double outer;
    bool exact; // term is exactly geometric beyond the window
};

Slopes slopes(const SpectralMeasure& mu, Weight w, double d_beta)
{
    const double n = mu.dimension();
    Slopes s{n, n, true};
    switch (mu.kind()) {
    case MeasureKind::white: break;
    case MeasureKind::power: s = {n - mu.alpha(), n - mu.alpha(), true}; break;
    case MeasureKind::bessel: s = {n, n - mu.alpha(), true}; break;
    case MeasureKind::heat: s = {n, -kInf, false}; break;
    case MeasureKind::atoms: break;
    }
    if (w == Weight::dbeta) {
        s.outer -= d_beta;
    } else {
        s.inner += d_beta;
        s.outer += d_beta;
    }
    return s;
}

IntegralReport radial_integral(const SpectralMeasure& mu, Weight w, double d_beta, int window, const char* name)
{
    if (!(d_beta > 0)) throw InvalidArgument(std::string(name) + " needs d_beta > 0");
    const double p = static_cast<double>(mu.prime());
    IntegralReport report;
    report.truncation = window;
    report.method = "shell window + geometric tails";

    if (!mu.is_radial()) {
        double total = 0;
        for (const auto& a : mu.atoms()) {
            const Order v = a.xi.order();
            if (v.is_infinite()) {
                total += w == Weight::dbeta ? a.mass : 0.0;
            } else {
                total += a.mass * weight(w, p, static_cast<int>(-v.value()), d_beta);
            }
        }
        report.value = total;
        report.method = "atom sum";
        return report;
    }

    const Slopes s = slopes(mu, w, d_beta);
    auto term = [&](int g) { return shell_mass(mu, g) * weight(w, p, g, d_beta); };

    int hi = window;
    const bool truncated_inside = mu.truncation() && *mu.truncation() <= window;
    if (truncated_inside) hi = *mu.truncation();
    const int lo = std::min(-window, hi);

    double sum = 0;
    for (int g = lo; g <= hi; ++g) sum += term(g);

    // Inner tail, gamma < lo.
    const double q_in = std::pow(p, -s.inner);
    report.ratio = q_in;
    if (q_in >= 1) return report;
    double tail;
    if (s.exact) {
        tail = term(lo) * q_in / (1 - q_in);
    } else {
        // Density <= 1: white-noise majorant.
        const double white = std::pow(p, static_cast<double>(lo) * mu.dimension()) * (1 - std::pow(p, -mu.dimension())) *
                             weight(w, p, lo, d_beta);
        tail = white * q_in / (1 - q_in);
    }
    report.tail = tail;

    // Outer tail, gamma > hi.
    if (!truncated_inside) {
        if (s.exact) {
            const double q_out = std::pow(p, s.outer);
            report.ratio = std::max(report.ratio, q_out);
            if (q_out >= 1) return report;
            const double t = term(hi) * q_out / (1 - q_out);
            tail += t;
            report.tail += t;
        } else {
            for (int g = hi + 1; g < hi + 10000; ++g) {
                const double t = term(g);
                sum += t;
                if (t <= 1e-18 * sum) break;
            }
        }
    }
    report.value = sum + tail;
    return report;
}

// sum_{j >= a} j^k x^j for 0 <= x < 1, k in {0, 1, 2}.
double power_geometric_tail(int k, double x, double a)
{
    const double xa = std::pow(x, a);
    const double s0 = 1 / (1 - x);
    const double s1 = x / ((1 - x) * (1 - x));
    const double s2 = x * (1 + x) / ((1 - x) * (1 - x) * (1 - x));
    switch (k) {
    case 0: return xa * s0;
    case 1: return xa * (s1 + a * s0);
    case 2: return xa * (s2 + 2 * a * s1 + a * a * s0);
    }
    throw InvalidArgument("power_geometric_tail: unsupported power");
}

// Finite sum of terms c * j^k * p^(s j) over depth j = -gamma >= 0.
class ShellExpansion
{
public:
    struct Term
    {
        double c;
        int k;
        double s;
    };

    explicit ShellExpansion(double p) : p_(p) {}
    ShellExpansion(double p, std::vector<Term> terms) : p_(p), terms_(std::move(terms)) { simplify(); }

    const std::vector<Term>& terms() const { return terms_; }

    ShellExpansion operator*(const ShellExpansion& o) const
    {
        std::vector<Term> out;
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) out.push_back({a.c * b.c, a.k + b.k, a.s + b.s});
        return ShellExpansion(p_, std::move(out));
    }

    double at(int j) const
    {
        double v = 0;
        for (const auto& t : terms_) v += t.c * std::pow(static_cast<double>(j), t.k) * std::pow(p_, t.s * j);
        return v;
    }

    /// Worst ratio p^s among surviving terms.
    double ratio() const
    {
        double r = 0;
        for (const auto& t : terms_) r = std::max(r, std::pow(p_, t.s));
        return r;
    }

    /// sum_{j > window}, or nullopt when some term does not decay.
    std::optional<double> tail(int window) const
    {
        double total = 0;
        for (const auto& t : terms_) {
            const double x = std::pow(p_, t.s);
            if (x >= 1) return std::nullopt;
            total += t.c * power_geometric_tail(t.k, x, window + 1);
        }
        return total;
    }

private:
    void simplify()
    {
        std::vector<Term> merged;
        for (const auto& t : terms_) {
            bool found = false;
            for (auto& m : merged) {
                if (m.k == t.k && std::abs(m.s - t.s) < 1e-12) {
                    m.c += t.c;
                    found = true;
                    break;
                }
            }
            if (!found) merged.push_back(t);
        }
        double scale = 0;
        for (const auto& m : merged) scale = std::max(scale, std::abs(m.c));
        std::erase_if(merged, [&](const Term& m) { return std::abs(m.c) <= 1e-14 * scale; });
        terms_ = std::move(merged);
    }

    double p_;
    std::vector<Term> terms_;
};

// K_alpha on the unit ball, as an expansion in j = -gamma.
ShellExpansion bessel_expansion(double alpha, std::int64_t p, int dimension)
{
    const double pd = static_cast<double>(p);
    const double n = dimension;
    if (std::abs(alpha - n) < 1e-12) {
        const double c = 1 - std::pow(pd, -n);
        return ShellExpansion(pd, {{c, 0, 0.0}, {c, 1, 0.0}});
    }
    const double c = riesz_constant(alpha, p, dimension);
    return ShellExpansion(pd, {{c, 0, n - alpha}, {-c * std::pow(pd, alpha - n), 0, 0.0}});
}

} // namespace

IntegralReport weighted_integral_dbeta(const SpectralMeasure& mu, double d_beta, int window)
{
    return radial_integral(mu, Weight::dbeta, d_beta, window, "weighted_integral_dbeta");
}

IntegralReport moment_integral(const SpectralMeasure& mu, double d_beta, int window)
{
    return radial_integral(mu, Weight::moment, d_beta, window, "moment_integral");
}

KernelDescriptor KernelDescriptor::riesz(std::int64_t p, int dimension, double alpha)
{
    if (!(alpha > 0 && alpha < dimension)) throw InvalidArgument("Riesz kernel needs 0 < alpha < N");
    return {Kind::riesz, p, dimension, alpha};
}

KernelDescriptor KernelDescriptor::bessel(std::int64_t p, int dimension, double alpha)
{
    if (!(alpha > 0)) throw InvalidArgument("Bessel kernel needs alpha > 0");
    return {Kind::bessel, p, dimension, alpha};
}

KernelDescriptor KernelDescriptor::heat(std::int64_t p, int dimension, double beta)
{
    if (!(beta > 0)) throw InvalidArgument("heat kernel needs beta > 0");
    return {Kind::heat, p, dimension, beta};
}

KernelDescriptor KernelDescriptor::constant(std::int64_t p, int dimension, double value)
{
    return {Kind::constant, p, dimension, value};
}

double KernelDescriptor::value(int gamma) const
{
    const double pd = static_cast<double>(p);
    switch (kind) {
    case Kind::riesz: return riesz_constant(parameter, p, dimension) * std::pow(pd, gamma * (parameter - dimension));
    case Kind::bessel: return bessel_value(parameter, p, dimension, gamma);
    case Kind::heat: return radial_heat_series(p, dimension, parameter, 1.0, -gamma, 200).value;
    case Kind::constant: return parameter;
    }
    return 0;
}

std::string KernelDescriptor::describe() const
{
    std::ostringstream os;
    const char* names[] = {"riesz", "bessel", "heat", "constant"};
    os << names[static_cast<int>(kind)] << "(p=" << p << ", N=" << dimension << ", " << parameter << ')';
    return os.str();
}

KernelDescriptor paired_kernel(const SpectralMeasure& mu)
{
    if (mu.truncation()) throw InvalidArgument("truncated measures have no closed-form kernel partner");
    switch (mu.kind()) {
    case MeasureKind::power: return KernelDescriptor::riesz(mu.prime(), mu.dimension(), mu.alpha());
    case MeasureKind::bessel: return KernelDescriptor::bessel(mu.prime(), mu.dimension(), mu.alpha());
    case MeasureKind::heat: return KernelDescriptor::heat(mu.prime(), mu.dimension(), mu.beta());
    case MeasureKind::white: throw InvalidArgument("white noise pairs with the Dirac delta, not a function");
    case MeasureKind::atoms: throw InvalidArgument("atomic measures have no radial kernel partner");
    }
    throw InvalidArgument("unknown measure kind");
}

IntegralReport position_side_integral(const KernelDescriptor& f, double d_beta, int window)
{
    if (!(d_beta > 0)) throw InvalidArgument("position_side_integral needs d_beta > 0");
    const double pd = static_cast<double>(f.p);
    const double n = f.dimension;
    const ShellExpansion volume(pd, {{1 - std::pow(pd, -n), 0, -n}});
    const ShellExpansion weight = volume * bessel_expansion(d_beta, f.p, f.dimension);

    IntegralReport report;
    report.truncation = window;
    report.method = "shell window + closed-form tail";

    if (f.kind == KernelDescriptor::Kind::heat) {
        // f is bounded and decreasing in ||x||; approximate it by f(0) past the window.
        double sum = 0;
        for (int j = 0; j <= window; ++j) sum += weight.at(j) * f.value(-j);
        const auto wtail = weight.tail(window);
        report.ratio = weight.ratio();
        if (!wtail) return report;
        const double f0 = ball_mass(SpectralMeasure::heat(f.p, f.dimension, f.parameter), 1 << 20);
        report.tail = f0 * *wtail;
        report.value = sum + report.tail;
        return report;
    }

    ShellExpansion kernel(pd);
    switch (f.kind) {
    case KernelDescriptor::Kind::riesz:
        kernel = ShellExpansion(pd, {{riesz_constant(f.parameter, f.p, f.dimension), 0, n - f.parameter}});
        break;
    case KernelDescriptor::Kind::bessel: kernel = bessel_expansion(f.parameter, f.p, f.dimension); break;
    case KernelDescriptor::Kind::constant: kernel = ShellExpansion(pd, {{f.parameter, 0, 0.0}}); break;
    case KernelDescriptor::Kind::heat: break;
    }
    const ShellExpansion integrand = weight * kernel;
    report.ratio = integrand.ratio();
    const auto tail = integrand.tail(window);
    if (!tail) return report;
    double sum = 0;
    for (int j = 0; j <= window; ++j) sum += integrand.at(j);
    report.tail = *tail;
    report.value = sum + *tail;
    return report;
}

LatticeField kernel_field(const SpectralMeasure& mu, const LatticePtr& lattice)
{
    switch (mu.kind()) {
    case MeasureKind::power:
        if (!mu.truncation()) return riesz_kernel(mu.alpha(), lattice).field;
        break;
    case MeasureKind::bessel:
        if (!mu.truncation()) return bessel_potential(mu.alpha(), lattice);
        break;
    default: break;
    }
    // f = sum_k mu_k chi_p(xi_k . x): the inverse transform of mass / cell volume.
    const auto masses = cell_masses(mu, *lattice);
    const double volume = lattice->cell_volume(Side::frequency);
    LatticeField density(lattice, Side::frequency);
    for (std::size_t i = 0; i < masses.size(); ++i) density[i] = masses[i] / volume;
    LatticeField f = inverse(density);
    for (auto& v : f.values()) v = v.real();
    return f;
}

EquivalenceReport check_equivalence(const SpectralMeasure& mu, double d_beta, std::size_t quadrature_cells)
{
    const KernelDescriptor f = paired_kernel(mu);
    EquivalenceReport report;
    report.pair = mu.describe() + " <-> " + f.describe();
    report.d_beta = d_beta;
    report.spectral = weighted_integral_dbeta(mu, d_beta);
    report.position = position_side_integral(f, d_beta);
    report.verdicts_agree = report.spectral.converged() == report.position.converged();
    if (!report.spectral.converged() || !report.position.converged()) return report;

    const double lhs = *report.spectral.value;
    report.relative_gap = std::abs(lhs - *report.position.value) / lhs;

    // Finest resolution with M = 0 under the cell budget.
    int m = 0;
    double cells = 1;
    const double step = std::pow(static_cast<double>(mu.prime()), mu.dimension());
    while (cells * step <= static_cast<double>(quadrature_cells)) {
        cells *= step;
        ++m;
    }
    if (m >= 1) {
        const LatticeParams params{mu.prime(), mu.dimension(), 0, m};
        const auto lattice = Lattice::make(params);
        const LatticeField product = kernel_field(mu, lattice) * bessel_potential(d_beta, lattice);
        report.lattice_quadrature = integrate(product).real();
        report.quadrature_lattice = params;
        report.lattice_relative_gap = std::abs(lhs - *report.lattice_quadrature) / lhs;
    }
    return report;
}

} // namespace ultraheat
