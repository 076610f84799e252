#include <doctest.h>

#include <cmath>

#include "ultraheat/errors.hpp"
#include "ultraheat/rng.hpp"
#include "ultraheat/solver.hpp"
#include "ultraheat/transform.hpp"

using namespace ultraheat;

namespace {

ModelSpec heat_spec(double sigma, double b, double u0)
{
    return ModelSpec{EllipticSymbol::linear(2, 1.0),
                     SpectralMeasure::heat(2, 1, 1.0),
                     sigma == 0 ? Coefficient::constant(0) : Coefficient::linear(sigma),
                     Coefficient::linear(b),
                     InitialDatum::constant(u0),
                     1.0,
                     8,
                     {2, 1, 3, 3},
                     4,
                     17};
}

ModelSpec additive_spec(SpectralMeasure mu)
{
    ModelSpec spec = heat_spec(0, 0, 0);
    spec.measure = std::move(mu);
    spec.sigma = Coefficient::constant(0.7);
    spec.b = Coefficient::constant(0);
    return spec;
}

} // namespace

TEST_CASE("coefficients")
{
    CHECK(Coefficient::constant(2)(5) == 2);
    CHECK(Coefficient::affine(2, 1)(3) == 7);
    CHECK(Coefficient::damped_linear(2)(1) == doctest::Approx(1.0));
    CHECK(Coefficient::damped_linear(2).lipschitz() == 2);
    CHECK(Coefficient::constant(0).is_zero());
    CHECK(coefficient_kind_from_string("affine") == Coefficient::Kind::affine);
    CHECK_THROWS_AS(coefficient_kind_from_string("cubic"), InvalidArgument);

    Coefficient lying = Coefficient::linear(3);
    lying.declared_lipschitz = 1.0;
    CHECK_THROWS_AS(lying.verify_lipschitz(), InvalidArgument);
    CHECK_NOTHROW(Coefficient::damped_linear(1.5).verify_lipschitz());

    ModelSpec spec = heat_spec(0.5, 0, 1);
    spec.sigma = lying;
    CHECK_THROWS_AS(Model{spec}, InvalidArgument);
}

TEST_CASE("initial term")
{
    const Model model(heat_spec(0, 0, 2.5));
    // Gamma(t) has mass 1 and the lattice is a group, so constants are fixed.
    for (double t : {0.0, 0.1, 1.0}) {
        const LatticeField v = initial_term(model, t);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i].real() == doctest::Approx(2.5).epsilon(1e-12));
    }

    ModelSpec spec = heat_spec(0, 0, 0);
    spec.u0 = InitialDatum::indicator(1.0, -1);
    const Model ind(spec);
    const LatticeField at0 = initial_term(ind, 0.0);
    CHECK(at0.values() == ind.u0().values());
    for (double t : {1e-3, 0.5, 1.0}) {
        const LatticeField v = initial_term(ind, t);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v[i].real() <= 1.0 + 1e-12);
            CHECK(v[i].real() >= -1e-12);
        }
    }
    const LatticeField small = initial_term(ind, 1e-6);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(std::abs(small[i] - at0[i]) < 1e-4);
}

TEST_CASE("deterministic dynamics")
{
    ModelSpec spec = heat_spec(0, 0, 0);
    spec.u0 = InitialDatum::indicator(1.0, 0);
    const Model model(spec);
    const NoisePath path = generate_path(model.context(), model.grid(), 3);
    const History h = step_exponential_euler(model, path);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const LatticeField ref = initial_term(model, model.grid().times()[i]);
        for (std::size_t c = 0; c < ref.size(); ++c) CHECK(std::abs(h[i][c] - ref[c]) <= 1e-12);
    }
    // I_0 is a fixed point of the Picard map when sigma = b = 0.
    const History next = picard_step(model, model.initial_history(), path);
    for (std::size_t i = 0; i < next.size(); ++i)
        for (std::size_t c = 0; c < next[i].size(); ++c) CHECK(std::abs(next[i][c] - model.initial_history()[i][c]) <= 1e-12);

    RunOptions opts;
    opts.keep_fields = true;
    const SolutionEnsemble e = run_stepper(model, opts);
    REQUIRE(e.stored.size() == 4);
    for (std::size_t r = 1; r < e.stored.size(); ++r) CHECK(e.stored[r] == e.stored[0]);
}

TEST_CASE("stepper is the Picard limit")
{
    ModelSpec spec = heat_spec(0.5, 0.25, 1.0);
    spec.steps = 4;
    const Model model(spec);
    RunOptions opts;
    opts.keep_fields = true;
    opts.snapshot_times = {0.5, 1.0};
    opts.picard_iterations = 6;
    const SolutionEnsemble step = run_stepper(model, opts);
    const PicardResult pic = run_picard(model, opts);
    REQUIRE(step.stored.size() == pic.ensemble.stored.size());
    for (std::size_t r = 0; r < step.stored.size(); ++r)
        for (std::size_t i = 0; i < step.stored[r].size(); ++i)
            CHECK(step.stored[r][i] == doctest::Approx(pic.ensemble.stored[r][i]).epsilon(1e-10));
    // Only strictly earlier times feed each update, so K iterations are exact.
    const auto finals = pic.diagnostics.final_values();
    CHECK(finals.back() <= 1e-20);

    const SolutionEnsemble again = run_stepper(model, opts);
    CHECK(again.stored == step.stored);
    CHECK(step.seeds[1] == replica_seed(17, 1));
}

TEST_CASE("Picard divergence is reported")
{
    ModelSpec spec = heat_spec(60.0, 0, 1.0);
    spec.steps = 64;
    spec.replicas = 2;
    const Model model(spec);
    RunOptions opts;
    opts.picard_iterations = 8;
    CHECK_THROWS_AS(run_picard(model, opts), Divergence);
}

TEST_CASE("variance oracle")
{
    const Model model(additive_spec(SpectralMeasure::heat(2, 1, 1.0)));
    CHECK(variance_oracle(model, 0.0) == 0.0);
    const auto& mu = model.context().masses();
    const auto& lambda = model.lambda();
    for (double t : {0.25, 1.0}) {
        // Simpson on integral_0^t sum_k mu_k exp(-2 s lambda_k) ds.
        const int n = 2000;
        auto f = [&](double s) {
            double acc = 0;
            for (std::size_t k = 0; k < mu.size(); ++k) acc += mu[k] * std::exp(-2 * s * lambda[k].real());
            return acc;
        };
        double sum = f(0) + f(t);
        for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * f(t * i / n);
        const double quad = 0.49 * sum * t / (3 * n);
        CHECK(variance_oracle(model, t) == doctest::Approx(quad).epsilon(1e-8));
    }

    const Model atom(additive_spec(SpectralMeasure::atomic(2, 1, {Atom{PAdicVector(2, {Rational(0)}), 3.0}})));
    CHECK(variance_oracle(atom, 0.5) == doctest::Approx(0.49 * 3.0 * 0.5).epsilon(1e-14));

    CHECK_THROWS_AS(variance_oracle(Model(heat_spec(0.5, 0, 0)), 1.0), NotAdditive);
}

TEST_CASE("moment accumulator")
{
    MomentAccumulator acc(1, 2);
    acc.set_shift({100.0, 0.0});
    for (double x : {101.0, 102.0, 103.0, 104.0}) acc.add({x, x - 100});
    CHECK(acc.count() == 4);
    CHECK(acc.mean(0, 0) == doctest::Approx(102.5));
    CHECK(acc.mean(0, 1) == doctest::Approx(2.5));
    CHECK(acc.variance(0, 0) == doctest::Approx(5.0 / 3));
    CHECK(acc.variance(0, 1) == doctest::Approx(5.0 / 3));
    CHECK(acc.second_moment(0, 1) == doctest::Approx(7.5));
    CHECK(acc.se_mean(0, 0) == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
}

TEST_CASE("hypothesis checks")
{
    const Model heat(additive_spec(SpectralMeasure::heat(2, 1, 1.0)));
    const HypothesisReport r = hypothesis_checks(heat);
    CHECK(r.a_pass);
    CHECK(r.b_pass);
    CHECK(r.c_pass);
    CHECK(r.d_decreasing);
    CHECK(r.all_pass());
    REQUIRE(r.limf.size() == 10);
    for (std::size_t i = 1; i < r.limf.size(); ++i) CHECK(r.limf[i].modulus <= r.limf[i - 1].modulus);

    // White noise has infinite mass against 1/max(1,|xi|)^(d beta) when d beta = N.
    const Model white(additive_spec(SpectralMeasure::white(2, 1)));
    const HypothesisReport w = hypothesis_checks(white);
    CHECK_FALSE(w.a_pass);
    CHECK_FALSE(w.all_pass());
    RunOptions opts;
    CHECK_THROWS_AS(run_stepper(white, opts), InvalidArgument);
    opts.override_hypotheses = true;
    CHECK_NOTHROW(run_stepper(white, opts));

    const Model cut(additive_spec(SpectralMeasure::white(2, 1).truncated(2)));
    CHECK(hypothesis_checks(cut).all_pass());

    // Riesz with alpha = 1/2: condition (a) holds, the moment condition does not.
    const Model riesz(additive_spec(SpectralMeasure::riesz(2, 1, 0.5)));
    const HypothesisReport rr = hypothesis_checks(riesz);
    CHECK(rr.a_pass);
    CHECK_FALSE(rr.c_pass);
    CHECK(rr.c_note.find("sufficient") != std::string::npos);
}
