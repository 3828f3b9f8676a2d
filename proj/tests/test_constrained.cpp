// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fene/constrained.hpp"
#include "fene/errors.hpp"
#include "fene/qe_oracle.hpp"

using namespace fene;

namespace {
ModelParams fene49() { return ModelParams{49.0, 1.0, 1.0, ForceModel::fene}; }

Ensemble make_ensemble(std::vector<double> xs, ModelParams p = fene49()) {
    Ensemble e;
    e.configs = std::move(xs);
    e.params = p;
    return e;
}

double max_scaled_residual(const Ensemble& ens, const MacroState& target) {
    const MacroState got = restrict_ensemble(ens, target.spec);
    double r = 0.0;
    for (std::size_t l = 0; l < got.values.size(); ++l) {
        r = std::max(r, std::abs(got.values[l] - target.values[l]) /
                            std::max(1.0, std::abs(target.values[l])));
    }
    return r;
}
} // namespace

TEST_CASE("projection of a feasible trial is the identity") {
    const StrategySpec spec = StrategySpec::even_moments(2, fene49());
    const Ensemble ens = make_ensemble({0.5, -1.0, 2.0, -0.3});
    const MacroState target = restrict_ensemble(ens, spec);
    const ProjectionResult res = project(ens, ens, target, spec);
    CHECK(res.newton_iters == 0);
    CHECK(res.multipliers == std::vector<double>{0.0, 0.0});
    CHECK(res.ensemble.configs == ens.configs); // bit-exact
}

TEST_CASE("two-particle projection has the closed-form multiplier") {
    // prev {1,-1}, trial {1.1,-0.9}, constraint <x^2> = 1: the multiplier
    // solves lambda^2 + 2 lambda + 0.01 = 0, near root (-2+sqrt(3.96))/2
    const StrategySpec spec = StrategySpec::even_moments(1, fene49());
    const Ensemble prev = make_ensemble({1.0, -1.0});
    const Ensemble trial = make_ensemble({1.1, -0.9});
    const MacroState target{{1.0}, spec, 0.0};
    const ProjectionResult res = project(prev, trial, target, spec);
    const double lambda_exact = (-2.0 + std::sqrt(3.96)) / 2.0; // -0.0050126
    REQUIRE(res.multipliers.size() == 1);
    CHECK(res.multipliers[0] == doctest::Approx(lambda_exact).epsilon(1e-9));
    CHECK(res.ensemble.configs[0] == doctest::Approx(1.0949874).epsilon(1e-7));
    CHECK(res.ensemble.configs[1] == doctest::Approx(-0.9050126).epsilon(1e-7));
    const double msq = (res.ensemble.configs[0] * res.ensemble.configs[0] +
                        res.ensemble.configs[1] * res.ensemble.configs[1]) /
                       2.0;
    CHECK(msq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duplicate constraints produce a singular Jacobian") {
    const auto dup = StrategySpec::custom(
        {{ObservableTerm::Kind::even_power, 1, 0.0}, {ObservableTerm::Kind::even_power, 1, 0.0}},
        fene49());
    const Ensemble prev = make_ensemble({1.0, -1.0, 0.5});
    const Ensemble trial = make_ensemble({1.1, -0.9, 0.6});
    const MacroState target{{1.0, 1.0}, dup, 0.0};
    CHECK_THROWS_AS(project(prev, trial, target, dup), SingularJacobianError);
}

TEST_CASE("projection with drift-free dynamics leaves multipliers near zero") {
    // Hookean with kappa = 1/(2 We): the drift vanishes, so a zero-noise
    // trial (= prev) already satisfies the constraints
    ModelParams hook = fene49();
    hook.force_model = ForceModel::hookean;
    const StrategySpec spec = StrategySpec::even_moments(2, hook);
    const Ensemble ens = make_ensemble({0.7, -1.3, 2.1}, hook);
    const MacroState target = restrict_ensemble(ens, spec);
    const ProjectionResult res = project(ens, ens, target, spec);
    CHECK(res.multipliers[0] == 0.0);
    CHECK(res.multipliers[1] == 0.0);
}

TEST_CASE("constrained_step preserves constraints and the FENE bound") {
    const ModelParams p = fene49();
    const double dt = 2e-4;
    for (const auto& spec :
         {StrategySpec::even_moments(1, p), StrategySpec::even_moments(4, p),
          StrategySpec::even_moments_plus_stress(2, p), StrategySpec::stress_cascade(p)}) {
        Ensemble ens = sample_equilibrium(4000, p, 41);
        for (auto& x : ens.configs) x *= 1.9; // stretched state
        const MacroState target = restrict_ensemble(ens, spec);
        const double bound = fene_step_bound(dt, p);
        for (int m = 0; m < 25; ++m) {
            ens = constrained_step(ens, target, spec, 2.0, dt,
                                   {41, rng::Phase::lift, static_cast<std::uint32_t>(m)});
            CHECK(max_scaled_residual(ens, target) <= 1e-8);
            double max_sq = 0.0;
            for (const double x : ens.configs) max_sq = std::max(max_sq, x * x);
            CHECK(max_sq <= bound);
        }
    }
}

TEST_CASE("strategy-1 target example: post-step mean square is exact") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    Ensemble ens = sample_equilibrium(5000, p, 43);
    const MacroState target{{1.5}, spec, 0.0};
    ProjectionResult init = project(ens, ens, target, spec);
    Ensemble cur = std::move(init.ensemble);
    for (int m = 0; m < 10; ++m) {
        cur = constrained_step(cur, target, spec, 0.0, 2e-4,
                               {43, rng::Phase::lift, static_cast<std::uint32_t>(m)});
    }
    CHECK(cur.mean_square() == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("lift restores the target (R o L = Id) and freezes the clock") {
    const ModelParams p = fene49();
    for (const auto& spec :
         {StrategySpec::even_moments(3, p), StrategySpec::stress_cascade(p)}) {
        Ensemble ref = sample_equilibrium(3000, p, 51);
        for (auto& x : ref.configs) x *= 1.6;
        MacroState target = restrict_ensemble(ref, spec);
        target.time = 1.25;
        LiftOptions opts;
        opts.kappa_frozen = 2.0;
        opts.dt = 2e-4;
        opts.m_inf = 60;
        const LiftReport report = lift(target, spec, opts, LiftInit::given(ref), 51);
        CHECK(report.steps_run == 60);
        CHECK(report.ensemble.time == 1.25);
        CHECK(max_scaled_residual(report.ensemble, target) <= 1e-8);
        CHECK(report.monitor.size() == 60);
    }
}

TEST_CASE("lift from equilibrium and uniform inits projects onto the target") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const MacroState target{{1.5}, spec, 0.0};
    LiftOptions opts;
    opts.dt = 2e-4;
    opts.m_inf = 5;
    for (const auto& init : {LiftInit::equilibrium(2000), LiftInit::uniform(2000)}) {
        const LiftReport report = lift(target, spec, opts, init, 7);
        CHECK(max_scaled_residual(report.ensemble, target) <= 1e-8);
    }
}

TEST_CASE("quasi-equilibrium lift is bit-identical to lift at kappa 0") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(2, p);
    Ensemble ref = sample_equilibrium(1000, p, 61);
    const MacroState target = restrict_ensemble(ref, spec);
    LiftOptions opts;
    opts.kappa_frozen = 0.0;
    opts.dt = 2e-4;
    opts.m_inf = 40;
    const LiftReport a = lift(target, spec, opts, LiftInit::given(ref), 61);
    const LiftReport b = quasi_equilibrium_lift(target, spec, opts, LiftInit::given(ref), 61);
    CHECK(a.ensemble.configs == b.ensemble.configs);
    CHECK(a.monitor == b.monitor);
}

TEST_CASE("FENE-P lift with a single constraint reaches the Gaussian law") {
    // at kappa = 0 the FENE-P force is linear given <X^2> = M, so the lifted
    // density is the zero-mean Gaussian with variance M: <X^4> = 3 M^2
    ModelParams p = fene49();
    p.force_model = ForceModel::fenep;
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const double target_m = 1.5;
    const MacroState target{{target_m}, spec, 0.0};
    LiftOptions opts;
    opts.dt = 1e-2;
    opts.m_inf = 3000;
    const LiftReport report =
        lift(target, spec, opts, LiftInit::equilibrium(50000), 71);
    CHECK(report.ensemble.mean_square() == doctest::Approx(target_m).epsilon(1e-10));
    double m4 = 0.0;
    for (const double x : report.ensemble.configs) m4 += x * x * x * x;
    m4 /= static_cast<double>(report.ensemble.size());
    // SE of <X^4> under the Gaussian: sqrt((105 - 9) sigma^8 / N)
    const double se = std::sqrt(96.0 * std::pow(target_m, 4) / 50000.0);
    CHECK(std::abs(m4 - 3.0 * target_m * target_m) < 3.0 * se);
}

TEST_CASE("plateau detector fires on stationary monitors") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    Ensemble ref = sample_equilibrium(2000, p, 81);
    const MacroState target = restrict_ensemble(ref, spec);
    LiftOptions opts;
    opts.kappa_frozen = 0.0;
    opts.dt = 2e-4;
    opts.m_inf = 2000;
    opts.plateau_window = 100;
    opts.stop_at_plateau = true;
    const LiftReport report = lift(target, spec, opts, LiftInit::given(ref), 81);
    CHECK(report.plateau_step > 0);
    CHECK(report.steps_run < 2000); // stopped early
}
