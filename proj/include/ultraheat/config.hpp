#pragma once

// JSON run configuration. Every key has an explicit default; unknown keys
// are rejected with their path.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultraheat/kernels.hpp"
#include "ultraheat/measure.hpp"
#include "ultraheat/solver.hpp"

namespace ultraheat {

struct AtomConfig
{
    std::vector<std::string> xi; ///< rational coordinates, e.g. "1/4"
    double mass = 0;
};

struct MeasureConfig
{
    std::string kind = "heat";
    double alpha = 0.5;
    double beta = 1.0;
    std::optional<int> truncate;
    std::vector<AtomConfig> atoms;
};

struct Tolerances
{
    double mass = 1e-6;
    double positivity = 1e-12;
    double semigroup = 1e-8;
    double oracle = 1e-6;
    double se_factor = 3.0;
};

struct RunConfig
{
    std::string command;
    LatticeParams lattice{2, 1, 6, 6};
    std::vector<Monomial> symbol_terms; ///< resolved to a default when empty
    double symbol_beta = 1.0;
    MeasureConfig measure;
    std::optional<double> d_beta; ///< spectral subcommand; defaults to the symbol's d beta
    Coefficient sigma = Coefficient::constant(1.0);
    Coefficient b = Coefficient::constant(0.0);
    InitialDatum u0 = InitialDatum::constant(0.0);
    double horizon = 1.0;
    int steps = 32;
    int replicas = 64;
    std::uint64_t seed = 0;
    std::string method = "stepper";
    int picard_iterations = 6;
    std::vector<double> times{0.1, 1.0, 10.0};
    std::vector<double> snapshots;
    bool override_hypotheses = false;
    Tolerances tolerances;
    std::string output = "ultraheat_out";
};

/// Throws ConfigError naming the offending field path.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& config);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string emit_config(const RunConfig& config);

EllipticSymbol build_symbol(const RunConfig& config);
SpectralMeasure build_measure(const RunConfig& config);
ModelSpec build_model_spec(const RunConfig& config);

} // namespace ultraheat
