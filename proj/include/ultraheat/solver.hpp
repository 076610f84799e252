#pragma once

// Mild solutions of du = -A u dt + b(u) dt + sigma(u) dW on a lattice, where
// A has symbol |a(xi)|_p^beta: the Picard scheme on a fixed noise path, an
// exponential-Euler stepper, and Monte Carlo moments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ultraheat/kernels.hpp"
#include "ultraheat/noise.hpp"
#include "ultraheat/spectral.hpp"

namespace ultraheat {

/// Built-in Lipschitz coefficients.
struct Coefficient
{
    enum class Kind { constant, linear, affine, damped_linear };

    Kind kind = Kind::constant;
    double a = 0; ///< slope (linear, affine)
    double c = 0; ///< value (constant), offset (affine), gain of c x / (1 + x^2)
    std::optional<double> declared_lipschitz;

    static Coefficient constant(double c);
    static Coefficient linear(double a);
    static Coefficient affine(double a, double c);
    static Coefficient damped_linear(double c);

    double operator()(double x) const;
    /// Declared constant, or the exact one for the kind.
    double lipschitz() const;
    bool is_zero() const;
    bool is_constant() const;
    std::string describe() const;

    /// Finite-difference slopes on a uniform sample of [-range, range] must
    /// not exceed lipschitz() + 1e-9; throws InvalidArgument otherwise.
    void verify_lipschitz(double range = 10.0, int samples = 20001) const;
};

const char* to_string(Coefficient::Kind kind);
Coefficient::Kind coefficient_kind_from_string(const std::string& name);

struct InitialDatum
{
    enum class Kind { constant, indicator, table };

    Kind kind = Kind::constant;
    double value = 0;
    int radius_exponent = 0;   ///< indicator of ||x||_p <= p^radius_exponent
    std::vector<double> table; ///< one value per position cell

    static InitialDatum constant(double value);
    static InitialDatum indicator(double value, int radius_exponent);
    static InitialDatum from_table(std::vector<double> values);

    LatticeField field(const LatticePtr& lattice) const;
};

const char* to_string(InitialDatum::Kind kind);

struct ModelSpec
{
    EllipticSymbol symbol;
    SpectralMeasure measure;
    Coefficient sigma;
    Coefficient b;
    InitialDatum u0;
    double horizon = 1.0;
    int steps = 32;
    LatticeParams lattice;
    int replicas = 1;
    std::uint64_t seed = 0;
};

/// Precomputed lattice objects shared by every replica.
class Model
{
public:
    explicit Model(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    const LatticePtr& lattice() const { return lattice_; }
    const UContext& context() const { return context_; }
    const TimeGrid& grid() const { return grid_; }
    const LatticeField& u0() const { return u0_; }
    const LatticeField& u0_hat() const { return u0_hat_; }
    /// lambda_k = |a(xi_k)|_p^beta.
    const LatticeField& lambda() const { return lambda_; }
    /// exp(-r dt lambda), r = 1.
    const LatticeField& step_multiplier() const { return step_; }
    /// sqrt((1 - exp(-2 dt lambda)) / (2 dt lambda)), 1 where lambda = 0.
    const LatticeField& noise_filter() const { return filter_; }

    LatticeField heat_multiplier(double t) const;
    /// I_0(t_i) for every grid time.
    const std::vector<LatticeField>& initial_history() const { return initial_; }

private:
    ModelSpec spec_;
    LatticePtr lattice_;
    UContext context_;
    TimeGrid grid_;
    LatticeField u0_, u0_hat_, lambda_, step_, filter_;
    std::vector<LatticeField> initial_;
};

/// Gamma(t) * u0; returns u0 itself at t = 0.
LatticeField initial_term(const Model& model, double t);

/// u(t_i) for i = 0..K, real position fields.
using History = std::vector<LatticeField>;

/// One Picard update on a fixed noise path:
///   u^{n+1}(t_i) = I_0(t_i) + sum_{j<i} E(t_i - t_{j+1}) Phi F[sigma(u^n(t_j)) dW_j]
///                + sum_{j<i} dt E(t_i - t_j) F[b(u^n(t_j))],
/// all in frequency space, with E(s) = exp(-s lambda).
History picard_step(const Model& model, const History& un, const NoisePath& path);

/// One replica of the exponential-Euler scheme
///   u_{j+1} = F^-1[E(dt) F u_j + dt E(dt) F b(u_j) + Phi F(sigma(u_j) dW_j)].
History step_exponential_euler(const Model& model, const NoisePath& path);

/// sigma0^2 sum_k mu_k (1 - exp(-2 t lambda_k)) / (2 lambda_k); the lambda = 0
/// cell contributes sigma0^2 mu_k t. Throws NotAdditive unless sigma is
/// constant, b is zero and u0 is zero.
double variance_oracle(const Model& model, double t);

/// Streaming moments per (snapshot, cell), accumulated in replica order.
class MomentAccumulator
{
public:
    MomentAccumulator(std::size_t snapshots, std::size_t cells);

    /// values[s * cells + c]; shift[s * cells + c] is subtracted first.
    void add(const std::vector<double>& values);
    void set_shift(std::vector<double> shift);

    std::size_t count() const { return n_; }
    double mean(std::size_t s, std::size_t c) const;
    /// Unbiased sample variance.
    double variance(std::size_t s, std::size_t c) const;
    double second_moment(std::size_t s, std::size_t c) const;
    /// Standard error of the mean.
    double se_mean(std::size_t s, std::size_t c) const;
    /// Standard error of the variance estimate, sqrt((m4 - v^2) / n).
    double se_variance(std::size_t s, std::size_t c) const;

private:
    std::size_t cells_;
    std::size_t n_ = 0;
    std::vector<double> shift_;
    std::vector<double> s1_, s2_, s3_, s4_;
};

struct SolutionEnsemble
{
    std::vector<double> snapshot_times;
    std::vector<std::size_t> snapshot_indices;
    std::vector<std::uint64_t> seeds;
    std::size_t cells = 0;
    /// stored[r][s * cells + c] when fields are kept.
    std::vector<std::vector<double>> stored;
    MomentAccumulator moments{0, 0};
};

struct PicardDiagnostics
{
    /// m[n][i] = M_n(t_i): sup over s <= t_i and cells of the replica mean of
    /// |u^{n+1} - u^n|^2.
    std::vector<std::vector<double>> m;
    /// J(t_i) = sum_k exp(-2 t_i lambda_k) mu_k.
    std::vector<double> j_table;
    /// Max over grid times and cells of the replica mean of |u|^2 (final iterate).
    double sup_second_moment = 0;

    std::vector<double> final_values() const; ///< M_n(T) for each n
};

struct RunOptions
{
    std::vector<double> snapshot_times; ///< empty means T only
    bool keep_fields = false;
    int picard_iterations = 6;
    bool override_hypotheses = false;
};

struct PicardResult
{
    SolutionEnsemble ensemble;
    PicardDiagnostics diagnostics;
};

/// Runs n_iters Picard updates per replica. Throws Divergence (with the
/// diagnostics in the message) when M_n(T) increases three times in a row.
PicardResult run_picard(const Model& model, const RunOptions& options);

SolutionEnsemble run_stepper(const Model& model, const RunOptions& options);

struct LimFPoint
{
    double h;
    double modulus;
};

struct HypothesisReport
{
    IntegralReport condition_a; ///< weighted_integral_dbeta
    bool a_pass = false;
    double kernel_mass = 0;     ///< integral of Gamma(T)
    bool b_pass = false;
    IntegralReport condition_c; ///< moment_integral (sufficient condition)
    bool c_pass = false;
    std::string c_note;
    std::vector<LimFPoint> limf;
    bool d_decreasing = false;

    bool all_pass() const { return a_pass && b_pass && d_decreasing; }
};

HypothesisReport hypothesis_checks(const Model& model);

/// integral over [0, T] of sum_k mu_k sup_{|r - t| < h, r >= 0} |E(r) - E(t)|^2 dt,
/// in closed form per cell: the sup sits at r = max(t - h, 0).
double limf_modulus(const Model& model, double h);

} // namespace ultraheat
