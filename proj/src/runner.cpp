#include "ultraheat/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "ultraheat/errors.hpp"
#include "ultraheat/rng.hpp"
#include "ultraheat/spectral.hpp"
#include "ultraheat/transform.hpp"

namespace ultraheat {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_command(const std::string& name)
{
    return name == "kernel" || name == "verify" || name == "spectral" || name == "noise-test" || name == "simulate" ||
           name == "moments";
}

namespace {

struct Context
{
    const RunConfig& config;
    fs::path dir;
    std::ostream& log;
    std::vector<std::string> outputs;

    std::ofstream open(const std::string& name)
    {
        outputs.push_back(name);
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write " + (dir / name).string());
        return f;
    }

    void write_json(const std::string& name, const json& j)
    {
        auto f = open(name);
        f << j.dump(2) << '\n';
    }
};

json report_json(const IntegralReport& r)
{
    json j{{"verdict", r.converged() ? "CONVERGENT" : "DIVERGENT"},
           {"truncation", r.truncation},
           {"tail", r.tail},
           {"ratio", r.ratio},
           {"method", r.method}};
    j["value"] = r.value ? json(*r.value) : json(nullptr);
    return j;
}

// Heat kernel field plus the 1-D radial series when the symbol is |xi|^d.
struct KernelRun
{
    HeatKernelField field;
    bool radial = false;
};

KernelRun kernel_at(const RunConfig& c, const EllipticSymbol& symbol, const LatticeField& values, double t)
{
    KernelRun k{heat_kernel(values, symbol, t), false};
    const auto bounds = check_elliptic(symbol, k.field.kernel.lattice());
    k.radial = bounds.c0 == 1 && bounds.c1 == 1;
    (void)c;
    return k;
}

int cmd_kernel(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const auto lattice = Lattice::make(c.lattice);
    const EllipticSymbol symbol = build_symbol(c);
    const LatticeField values = symbol_field(symbol, lattice);
    const double exponent = symbol.d_beta();
    json summary = json::array();
    for (std::size_t ti = 0; ti < c.times.size(); ++ti) {
        const double t = c.times[ti];
        const KernelRun k = kernel_at(c, symbol, values, t);
        auto csv = ctx.open("kernel_t" + std::to_string(ti) + ".csv");
        csv << "shell_exponent,gamma_value,series_value,abs_diff\n";
        double max_diff = 0;
        auto row = [&](const std::string& shell, double g, std::optional<double> s) {
            csv << shell << ',' << format_double(g) << ',' << (s ? format_double(*s) : "nan") << ','
                << (s ? format_double(std::abs(g - *s)) : "nan") << '\n';
            if (s) max_diff = std::max(max_diff, std::abs(g - *s));
        };
        const int depth = 200;
        row("-inf", k.field.kernel[0].real(),
            k.radial ? std::optional(radial_heat_ball_average(c.lattice.p, c.lattice.dimension, exponent, t,
                                                              c.lattice.resolution, depth).value)
                     : std::nullopt);
        for (int g = lattice->min_shell(Side::position); g <= lattice->max_shell(Side::position); ++g) {
            double v = 0;
            for (std::size_t i : lattice->shell(g, Side::position)) v = std::max(v, k.field.kernel[i].real());
            row(std::to_string(g), v,
                k.radial ? std::optional(radial_heat_series(c.lattice.p, c.lattice.dimension, exponent, t, -g, depth).value)
                         : std::nullopt);
        }
        summary.push_back({{"t", t},
                           {"file", "kernel_t" + std::to_string(ti) + ".csv"},
                           {"mass", integrate(k.field.kernel).real()},
                           {"min", k.field.kernel.min_real()},
                           {"fitted_A", fit_decay_constant(k.field, symbol.d_beta()).constant},
                           {"tail_mass_bound", k.field.tail_mass_bound},
                           {"tail_warning", k.field.tail_warning},
                           {"radial_series", k.radial},
                           {"max_series_abs_diff", k.radial ? json(max_diff) : json(nullptr)}});
        if (k.field.tail_warning) ctx.log << "warning: heat kernel tail mass bound " << k.field.tail_mass_bound << " at t=" << t << '\n';
    }
    ctx.write_json("kernel_summary.json", {{"kernels", summary}});
    return exit_pass;
}

int cmd_verify(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const auto lattice = Lattice::make(c.lattice);
    const EllipticSymbol symbol = build_symbol(c);
    const LatticeField values = symbol_field(symbol, lattice);
    const auto& tol = c.tolerances;
    struct Check
    {
        std::string name;
        double t, t2, value, tolerance;
        bool pass;
    };
    std::vector<Check> checks;
    std::vector<HeatKernelField> kernels;
    for (double t : c.times) kernels.push_back(heat_kernel(values, symbol, t));
    for (const auto& k : kernels) {
        const double min = k.kernel.min_real();
        checks.push_back({"(i) positivity", k.t, 0, min, -tol.positivity, min >= -tol.positivity});
        const double mass = std::abs(integrate(k.kernel).real() - 1);
        checks.push_back({"(ii) mass", k.t, 0, mass, tol.mass, mass <= tol.mass});
        const double a = fit_decay_constant(k, symbol.d_beta()).constant;
        checks.push_back({"(vi) decay bound constant", k.t, 0, a, 0, std::isfinite(a) && a > 0});
    }
    for (std::size_t i = 0; i < c.times.size(); ++i)
        for (std::size_t j = i; j < c.times.size(); ++j) {
            const double t = c.times[i], t2 = c.times[j];
            const LatticeField lhs = convolve(kernels[i].kernel, kernels[j].kernel);
            const LatticeField rhs = heat_kernel(values, symbol, t + t2).kernel;
            const double d = max_abs_diff(lhs, rhs);
            checks.push_back({"(iv) semigroup", t, t2, d, tol.semigroup, d <= tol.semigroup});
        }
    auto csv = ctx.open("verify.csv");
    csv << "check,t,t2,value,tolerance,pass\n";
    json list = json::array();
    bool ok = true;
    for (const auto& ch : checks) {
        csv << ch.name << ',' << format_double(ch.t) << ',' << format_double(ch.t2) << ',' << format_double(ch.value) << ','
            << format_double(ch.tolerance) << ',' << (ch.pass ? "true" : "false") << '\n';
        list.push_back({{"check", ch.name}, {"t", ch.t}, {"t2", ch.t2}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ch.pass}});
        if (!ch.pass) {
            ok = false;
            ctx.log << "FAILED " << ch.name << " at t=" << ch.t << ": " << ch.value << '\n';
        }
    }
    ctx.write_json("verify_report.json", {{"checks", list}, {"pass", ok}});
    return ok ? exit_pass : exit_check_failed;
}

int cmd_spectral(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const SpectralMeasure mu = build_measure(c);
    const double d_beta = c.d_beta ? *c.d_beta : build_symbol(c).d_beta();
    json report{{"measure", mu.describe()}, {"d_beta", d_beta}};
    report["weighted_integral_dbeta"] = report_json(weighted_integral_dbeta(mu, d_beta));
    report["moment_integral"] = report_json(moment_integral(mu, d_beta));
    try {
        const EquivalenceReport e = check_equivalence(mu, d_beta);
        json eq{{"pair", e.pair},
                {"spectral", report_json(e.spectral)},
                {"position", report_json(e.position)},
                {"relative_gap", e.relative_gap},
                {"lattice_relative_gap", e.lattice_relative_gap},
                {"verdicts_agree", e.verdicts_agree}};
        eq["lattice_quadrature"] = e.lattice_quadrature ? json(*e.lattice_quadrature) : json(nullptr);
        report["equivalence"] = eq;
    } catch (const InvalidArgument& e) {
        report["equivalence"] = {{"skipped", e.what()}};
    }
    ctx.write_json("spectral_report.json", report);
    return exit_pass;
}

int cmd_noise_test(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const auto lattice = Lattice::make(c.lattice);
    const UContext uc = UContext::make(build_measure(c), lattice);
    const TimeGrid grid = TimeGrid::uniform(c.horizon, c.steps);
    const double k = c.tolerances.se_factor;
    const std::size_t R = static_cast<std::size_t>(c.replicas);

    // phi = indicator of the unit ball, psi = indicator of B_{-1}.
    const LatticeField phi = ball_indicator(lattice, Side::position, 0);
    const LatticeField psi = ball_indicator(lattice, Side::position, std::max(-1, -c.lattice.resolution));
    const LatticeField phi_hat = forward(phi), psi_hat = forward(psi);
    const std::size_t half = grid.steps() / 2;
    // Two-level deterministic step integrand: phi before the midpoint, psi after.
    std::vector<LatticeField> g;
    for (std::size_t j = 0; j < grid.steps(); ++j) g.push_back(j < std::max<std::size_t>(half, 1) ? phi : psi);

    double s_wt = 0, s_wt2 = 0, s_cov = 0, s_cov2 = 0, s_iso = 0, s_iso2 = 0, max_imag = 0;
    double s_ws = 0, s_ws2 = 0;
    for (std::size_t r = 0; r < R; ++r) {
        const std::uint64_t seed = replica_seed(c.seed, r);
        double wt = 0, ws = 0, a = 0, b = 0, iso = 0;
        for (std::size_t j = 0; j < grid.steps(); ++j) {
            const LatticeField inc = sample_increment(grid.dt(j), uc, {seed, j});
            const double wp = pairing(phi_hat, inc, uc);
            wt += wp;
            if (j < half) ws += wp;
            if (j == 0) {
                a = wp;
                b = pairing(psi_hat, inc, uc);
                if (r < 16) max_imag = std::max(max_imag, inverse(inc).max_abs_imag());
            }
            iso += j < std::max<std::size_t>(half, 1) ? wp : pairing(psi_hat, inc, uc);
        }
        s_wt += wt * wt;
        s_wt2 += wt * wt * wt * wt;
        s_ws += ws * wt;
        s_ws2 += ws * wt * ws * wt;
        s_cov += a * b;
        s_cov2 += a * b * a * b;
        s_iso += iso * iso;
        s_iso2 += iso * iso * iso * iso;
    }
    const double n = static_cast<double>(R);
    auto se = [&](double s, double s2) { return std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)) / n); };
    const double norm_phi = u_norm2(phi, uc);
    struct Row
    {
        std::string name;
        double empirical, analytic, se;
        bool pass;
    };
    std::vector<Row> rows;
    auto add = [&](std::string name, double s, double s2, double analytic) {
        const double e = se(s, s2);
        rows.push_back({std::move(name), s / n, analytic, e, std::abs(s / n - analytic) <= k * e});
    };
    add("brownian variance E[W_T(phi)^2]", s_wt, s_wt2, grid.horizon() * norm_phi);
    add("brownian covariance E[W_s(phi) W_T(phi)]", s_ws, s_ws2, grid.times()[half] * norm_phi);
    add("increment covariance E[W(phi) W(psi)]", s_cov, s_cov2, grid.dt(0) * u_inner(phi, psi, uc));
    add("isometry E[(g.W)^2]", s_iso, s_iso2, isometry_variance(g, grid, uc));
    rows.push_back({"position increment max |imag|", max_imag, 0, 0, max_imag <= 1e-12});

    auto csv = ctx.open("noise_checks.csv");
    csv << "check,empirical,analytic,se,pass\n";
    json list = json::array();
    bool ok = true;
    for (const auto& row : rows) {
        csv << '"' << row.name << "\"," << format_double(row.empirical) << ',' << format_double(row.analytic) << ','
            << format_double(row.se) << ',' << (row.pass ? "true" : "false") << '\n';
        list.push_back({{"check", row.name}, {"empirical", row.empirical}, {"analytic", row.analytic}, {"se", row.se}, {"pass", row.pass}});
        if (!row.pass) {
            ok = false;
            ctx.log << "FAILED " << row.name << ": " << row.empirical << " vs " << row.analytic << " (se " << row.se << ")\n";
        }
    }
    ctx.write_json("noise_report.json", {{"measure", build_measure(c).describe()}, {"replicas", c.replicas}, {"checks", list}, {"pass", ok}});
    return ok ? exit_pass : exit_check_failed;
}

struct Ensemble
{
    SolutionEnsemble ens;
    std::optional<PicardDiagnostics> diag;
};

Ensemble run_model(const Model& model, const RunConfig& c, bool keep)
{
    RunOptions opt;
    opt.snapshot_times = c.snapshots;
    opt.keep_fields = keep;
    opt.picard_iterations = c.picard_iterations;
    opt.override_hypotheses = c.override_hypotheses;
    if (c.method == "picard") {
        PicardResult r = run_picard(model, opt);
        return {std::move(r.ensemble), std::move(r.diagnostics)};
    }
    return {run_stepper(model, opt), std::nullopt};
}

json diagnostics_json(const PicardDiagnostics& d)
{
    return {{"M_n_T", d.final_values()}, {"J", d.j_table}, {"sup_second_moment", d.sup_second_moment}};
}

int cmd_simulate(Context& ctx)
{
    const Model model(build_model_spec(ctx.config));
    const Ensemble e = run_model(model, ctx.config, true);
    auto csv = ctx.open("snapshots.csv");
    csv << "replica,t,cell_index,value\n";
    for (std::size_t r = 0; r < e.ens.stored.size(); ++r)
        for (std::size_t s = 0; s < e.ens.snapshot_times.size(); ++s)
            for (std::size_t c = 0; c < e.ens.cells; ++c)
                csv << r << ',' << format_double(e.ens.snapshot_times[s]) << ',' << c << ','
                    << format_double(e.ens.stored[r][s * e.ens.cells + c]) << '\n';
    if (e.diag) ctx.write_json("picard_diagnostics.json", diagnostics_json(*e.diag));
    return exit_pass;
}

int cmd_moments(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const Model model(build_model_spec(c));
    const Ensemble e = run_model(model, c, false);
    const auto& m = e.ens.moments;
    auto csv = ctx.open("moments.csv");
    csv << "t,cell_index,mean,var,se\n";
    for (std::size_t s = 0; s < e.ens.snapshot_times.size(); ++s)
        for (std::size_t cell = 0; cell < e.ens.cells; ++cell)
            csv << format_double(e.ens.snapshot_times[s]) << ',' << cell << ',' << format_double(m.mean(s, cell)) << ','
                << format_double(m.variance(s, cell)) << ',' << format_double(m.se_mean(s, cell)) << '\n';

    json report{{"replicas", c.replicas}, {"method", c.method}};
    double sup2 = 0;
    for (std::size_t s = 0; s < e.ens.snapshot_times.size(); ++s)
        for (std::size_t cell = 0; cell < e.ens.cells; ++cell) sup2 = std::max(sup2, m.second_moment(s, cell));
    report["sup_second_moment"] = sup2;
    if (e.diag) report["picard"] = diagnostics_json(*e.diag);
    bool ok = std::isfinite(sup2);
    try {
        json oracle = json::array();
        for (std::size_t s = 0; s < e.ens.snapshot_times.size(); ++s) {
            const double t = e.ens.snapshot_times[s];
            const double v = variance_oracle(model, t);
            double worst = 0;
            for (std::size_t cell = 0; cell < e.ens.cells; ++cell) {
                const double se = m.se_variance(s, cell);
                const double z = se > 0 ? std::abs(m.variance(s, cell) - v) / se : (m.variance(s, cell) == v ? 0 : INFINITY);
                worst = std::max(worst, z);
            }
            const bool pass = worst <= c.tolerances.se_factor;
            oracle.push_back({{"t", t}, {"oracle_variance", v}, {"max_z", worst}, {"pass", pass}});
            if (!pass) {
                ok = false;
                ctx.log << "FAILED variance oracle at t=" << t << ": max z " << worst << '\n';
            }
        }
        report["variance_oracle"] = oracle;
    } catch (const NotAdditive&) {
        report["variance_oracle"] = nullptr;
    }
    report["pass"] = ok;
    ctx.write_json("moments_report.json", report);
    return ok ? exit_pass : exit_check_failed;
}

} // namespace

int run(const RunConfig& config, std::ostream& log)
{
    if (!is_command(config.command)) {
        log << "unknown command '" << config.command << "'\n";
        return exit_usage;
    }
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, fs::path(config.output), log, {}};
    int code = exit_usage;
    try {
        fs::create_directories(ctx.dir);
        if (config.command == "kernel") code = cmd_kernel(ctx);
        else if (config.command == "verify") code = cmd_verify(ctx);
        else if (config.command == "spectral") code = cmd_spectral(ctx);
        else if (config.command == "noise-test") code = cmd_noise_test(ctx);
        else if (config.command == "simulate") code = cmd_simulate(ctx);
        else code = cmd_moments(ctx);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Divergence& e) {
        log << "check failed: " << e.what() << '\n';
        code = exit_check_failed;
    } catch (const NotElliptic& e) {
        log << "check failed: " << e.what() << '\n';
        code = exit_check_failed;
    } catch (const PrecisionOverflow& e) {
        log << "check failed: " << e.what() << '\n';
        code = exit_check_failed;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const fs::filesystem_error& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{{"version", version},
                  {"command", config.command},
                  {"config", to_json(config)},
                  {"seed", config.seed},
                  {"replica_seed_rule", "master xor replica_index"},
                  {"outputs", ctx.outputs},
                  {"exit_code", code},
                  {"wall_time_seconds", wall}};
    std::ofstream(ctx.dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
    return code;
}

} // namespace ultraheat
