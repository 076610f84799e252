#include "ultraheat/noise.hpp"

#include <cmath>

#include "ultraheat/errors.hpp"
#include "ultraheat/rng.hpp"
#include "ultraheat/transform.hpp"

namespace ultraheat {

UContext::UContext(LatticePtr lattice, std::vector<double> masses) : lattice_(std::move(lattice)), masses_(std::move(masses))
{
    if (masses_.size() != lattice_->size()) throw DimensionMismatch("mass vector does not match the lattice");
    for (std::size_t k = 0; k < masses_.size(); ++k) {
        if (!(masses_[k] >= 0)) throw InvalidArgument("cell masses must be nonnegative");
        const std::size_t nk = lattice_->negate_index(k);
        if (nk < k) continue;
        const double a = masses_[k], b = masses_[nk];
        if (std::abs(a - b) > 1e-12 * std::max(a, b))
            throw InvalidArgument("cell masses are not symmetric under xi -> -xi at cell " + std::to_string(k));
        orbits_.push_back({k, nk});
    }
}

UContext UContext::make(const SpectralMeasure& mu, const LatticePtr& lattice)
{
    return UContext(lattice, cell_masses(mu, *lattice));
}

namespace {

void require_context(const LatticeField& f, const UContext& ctx)
{
    if (f.lattice().params() != ctx.lattice().params()) throw DimensionMismatch("field and noise context lattices differ");
}

} // namespace

double u_inner(const LatticeField& phi, const LatticeField& psi, const UContext& ctx)
{
    require_context(phi, ctx);
    require_context(psi, ctx);
    const LatticeField a = forward(phi);
    const LatticeField b = forward(psi);
    std::vector<double> terms(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) terms[k] = (a[k] * std::conj(b[k])).real() * ctx.masses()[k];
    return pairwise_sum(terms);
}

double u_norm2(const LatticeField& phi, const UContext& ctx)
{
    return u_inner(phi, phi, ctx);
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times))
{
    if (times_.size() < 2) throw InvalidArgument("time grid needs at least one step");
    if (times_.front() != 0.0) throw InvalidArgument("time grid must start at 0");
    for (std::size_t j = 1; j < times_.size(); ++j)
        if (!(times_[j] > times_[j - 1])) throw InvalidArgument("time grid must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double horizon, int steps)
{
    if (!(horizon > 0) || steps < 1) throw InvalidArgument("uniform grid needs T > 0 and steps >= 1");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) t[static_cast<std::size_t>(j)] = horizon * j / steps;
    return TimeGrid(std::move(t));
}

bool TimeGrid::is_uniform() const
{
    const double h = dt(0);
    for (std::size_t j = 1; j < steps(); ++j)
        if (std::abs(dt(j) - h) > 1e-12 * h) return false;
    return true;
}

std::size_t TimeGrid::index_of(double t) const
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < times_.size(); ++j)
        if (std::abs(times_[j] - t) < std::abs(times_[best] - t)) best = j;
    if (std::abs(times_[best] - t) > 1e-9 * std::max(1.0, horizon()))
        throw InvalidArgument("time " + std::to_string(t) + " is not on the grid");
    return best;
}

LatticeField sample_increment(double dt, const UContext& ctx, NoiseKey key)
{
    if (!(dt > 0)) throw InvalidArgument("sample_increment needs dt > 0");
    LatticeField out(ctx.lattice_ptr(), Side::frequency);
    const auto& mu = ctx.masses();
    const auto& orbits = ctx.orbits();
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        const Orbit& orb = orbits[o];
        const NormalPair z = normal_pair(key.seed, key.step, o);
        if (orb.self_paired()) {
            out[orb.cell] = std::sqrt(dt * mu[orb.cell]) * z.g;
        } else {
            const double s = std::sqrt(dt * mu[orb.cell] / 2);
            out[orb.cell] = {s * z.g, s * z.h};
            out[orb.partner] = {s * z.g, -s * z.h};
        }
    }
    return out;
}

LatticeField position_increment(const LatticeField& increment)
{
    LatticeField x = inverse(increment);
    const auto& lat = increment.lattice();
    const double scale = std::pow(static_cast<double>(lat.prime()), static_cast<double>(lat.support_exponent() * lat.dimension()));
    for (auto& v : x.values()) v = v.real() * scale;
    return x;
}

double pairing(const LatticeField& phi_hat, const LatticeField& increment, const UContext& ctx)
{
    if (phi_hat.side() != Side::frequency || increment.side() != Side::frequency)
        throw SideMismatch("pairing expects frequency-side fields");
    require_context(phi_hat, ctx);
    std::vector<double> terms;
    terms.reserve(ctx.orbits().size());
    for (const Orbit& orb : ctx.orbits()) {
        const double w = orb.self_paired() ? 1.0 : 2.0;
        terms.push_back(w * (phi_hat[orb.cell] * std::conj(increment[orb.cell])).real());
    }
    return pairwise_sum(terms);
}

NoisePath generate_path(const UContext& ctx, const TimeGrid& grid, std::uint64_t seed)
{
    NoisePath path{grid, seed, {}};
    path.increments.reserve(grid.steps());
    for (std::size_t j = 0; j < grid.steps(); ++j) path.increments.push_back(sample_increment(grid.dt(j), ctx, {seed, j}));
    return path;
}

const LatticeField& PastIncrements::operator[](std::size_t j) const
{
    if (j >= step_)
        throw NotPredictable("integrand for step " + std::to_string(step_) + " read increment " + std::to_string(j));
    return path_.increments[j];
}

double stochastic_integral(const StepIntegrand& g, const NoisePath& path, const UContext& ctx)
{
    double total = 0;
    for (std::size_t j = 0; j < path.increments.size(); ++j) {
        const LatticeField gj = g(PastIncrements(path, j));
        total += pairing(forward(gj), path.increments[j], ctx);
    }
    return total;
}

double stochastic_integral(const std::vector<LatticeField>& g, const NoisePath& path, const UContext& ctx)
{
    if (g.size() != path.increments.size()) throw DimensionMismatch("integrand has wrong number of steps");
    return stochastic_integral([&](const PastIncrements& past) { return g[past.step()]; }, path, ctx);
}

double isometry_variance(const std::vector<LatticeField>& g, const TimeGrid& grid, const UContext& ctx)
{
    if (g.size() != grid.steps()) throw DimensionMismatch("integrand has wrong number of steps");
    double total = 0;
    for (std::size_t j = 0; j < g.size(); ++j) total += grid.dt(j) * u_norm2(g[j], ctx);
    return total;
}

std::vector<double> brownian_path(const LatticeField& phi, const UContext& ctx, const TimeGrid& grid, std::uint64_t seed)
{
    const LatticeField phi_hat = forward(phi);
    std::vector<double> w(grid.times().size(), 0.0);
    for (std::size_t j = 0; j < grid.steps(); ++j)
        w[j + 1] = w[j] + pairing(phi_hat, sample_increment(grid.dt(j), ctx, {seed, j}), ctx);
    return w;
}

} // namespace ultraheat
