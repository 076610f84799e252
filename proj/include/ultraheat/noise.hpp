#pragma once

// Spatially homogeneous Gaussian noise, white in time, sampled in the
// frequency basis of a lattice.
//
// Cells pair up into orbits {k, -k}. On a two-element orbit the increment is
// sqrt(dt mu_k / 2) (g + i h) with the conjugate at -k; on a self-paired cell
// it is sqrt(dt mu_k) g. The pairing W(phi) = sum_orbits w Re[F phi conj dW]
// (w = 2 for pairs, 1 otherwise) then has variance dt ||phi||_U^2.

#include <cstdint>
#include <functional>
#include <vector>

#include "ultraheat/lattice.hpp"
#include "ultraheat/measure.hpp"

namespace ultraheat {

struct Orbit
{
    std::size_t cell;    ///< lower index of the pair
    std::size_t partner; ///< negate(cell); equal to cell when self-paired
    bool self_paired() const { return cell == partner; }
};

class UContext
{
public:
    /// Throws InvalidArgument for negative masses or mu_k != mu_{-k}.
    UContext(LatticePtr lattice, std::vector<double> masses);

    static UContext make(const SpectralMeasure& mu, const LatticePtr& lattice);

    const Lattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }
    const std::vector<double>& masses() const { return masses_; }
    const std::vector<Orbit>& orbits() const { return orbits_; }

private:
    LatticePtr lattice_;
    std::vector<double> masses_;
    std::vector<Orbit> orbits_;
};

/// <phi, psi>_U = sum_k F phi(xi_k) conj(F psi(xi_k)) mu_k for real position fields.
double u_inner(const LatticeField& phi, const LatticeField& psi, const UContext& ctx);
double u_norm2(const LatticeField& phi, const UContext& ctx);

class TimeGrid
{
public:
    explicit TimeGrid(std::vector<double> times);
    static TimeGrid uniform(double horizon, int steps);

    const std::vector<double>& times() const { return times_; }
    std::size_t steps() const { return times_.size() - 1; }
    double horizon() const { return times_.back(); }
    double dt(std::size_t j) const { return times_[j + 1] - times_[j]; }
    bool is_uniform() const;

    /// Index of the grid time closest to t; throws InvalidArgument if off-grid by more than 1e-9.
    std::size_t index_of(double t) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> times_;
};

/// Counter key of one increment.
struct NoiseKey
{
    std::uint64_t seed;
    std::uint64_t step;
};

/// Frequency-side increment over a step of length dt.
LatticeField sample_increment(double dt, const UContext& ctx, NoiseKey key);

/// Position-side noise field p^(MN) F^-1 dW: its forward transform is
/// p^(MN) dW and its pairing with phi is the lattice integral of phi dW.
LatticeField position_increment(const LatticeField& increment);

/// W(phi) for one increment, given F phi.
double pairing(const LatticeField& phi_hat, const LatticeField& increment, const UContext& ctx);

struct NoisePath
{
    TimeGrid grid;
    std::uint64_t seed;
    std::vector<LatticeField> increments; ///< one per step
};

NoisePath generate_path(const UContext& ctx, const TimeGrid& grid, std::uint64_t seed);

/// Read access to the increments strictly before a step. Reaching for the
/// current or a later increment throws NotPredictable.
class PastIncrements
{
public:
    PastIncrements(const NoisePath& path, std::size_t step) : path_(path), step_(step) {}

    std::size_t step() const { return step_; }
    const LatticeField& operator[](std::size_t j) const;

private:
    const NoisePath& path_;
    std::size_t step_;
};

/// Step process: integrand on [t_j, t_{j+1}) built from increments 0..j-1.
using StepIntegrand = std::function<LatticeField(const PastIncrements&)>;

/// sum_j W_j(g_{t_j}); the integrand for step j is built before dW_j is read.
double stochastic_integral(const StepIntegrand& g, const NoisePath& path, const UContext& ctx);
/// Deterministic integrand, one position field per step.
double stochastic_integral(const std::vector<LatticeField>& g, const NoisePath& path, const UContext& ctx);

/// sum_j dt_j ||g_j||_U^2.
double isometry_variance(const std::vector<LatticeField>& g, const TimeGrid& grid, const UContext& ctx);

/// W_t(phi) at every grid time, W_0 = 0.
std::vector<double> brownian_path(const LatticeField& phi, const UContext& ctx, const TimeGrid& grid,
                                  std::uint64_t seed);

} // namespace ultraheat
