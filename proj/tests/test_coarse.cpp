// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fene/coarse.hpp"
#include "fene/errors.hpp"
#include "fene/fenep_ode.hpp"
#include "fene/parallel.hpp"

using namespace fene;

namespace {
ModelParams fene49() { return ModelParams{49.0, 1.0, 1.0, ForceModel::fene}; }
} // namespace

TEST_CASE("degenerate coarse run reduces to plain micro stepping") {
    // m_inf = 0 with a warm start: the lift is an identity projection, so the
    // coarse trajectory must equal the micro reference bit for bit
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(2, p);
    const Ensemble init = sample_equilibrium(2000, p, 99);
    const FlowSchedule flow = FlowSchedule::complex();
    const double dt = 2e-4;
    const double t_end = 0.05;

    CoarseConfig cfg{spec, dt, 1, 0, 2000, LiftMode::frozen_kappa, 99, true, false, 0};
    const MacroTrajectory coarse = run_coarse(restrict_ensemble(init, spec), flow, cfg, t_end,
                                              init);
    const MacroTrajectory micro = run_micro_reference(init, flow, dt, t_end, spec, 99);
    REQUIRE(coarse.size() == micro.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        CHECK(coarse.times[i] == micro.times[i]);
        CHECK(coarse.states[i].values == micro.states[i].values);
        CHECK(coarse.stress[i] == micro.stress[i]);
    }
}

TEST_CASE("coarse_step at equilibrium stays at equilibrium") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const Ensemble init = sample_equilibrium(20000, p, 101);
    CoarseConfig cfg{spec, 2e-4, 50, 20, 20000, LiftMode::frozen_kappa, 101, true, false, 0};
    CoarseStepper stepper(restrict_ensemble(init, spec), FlowSchedule::zero(), cfg, init);
    const MacroState& m = stepper.step();
    const double m2_exact = 49.0 / 52.0;
    const double se = std::sqrt(1.68 / 20000.0); // var(x^2) under phi_eq
    CHECK(std::abs(m.values[0] - m2_exact) < 3.0 * se);
    CHECK(std::abs(stepper.tau_p()) < 3.0 * 0.0131); // var(xF)_eq ~ 3.43 - 1
}

TEST_CASE("macro trajectory invariants") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const Ensemble init = sample_equilibrium(1000, p, 103);
    CoarseConfig cfg{spec, 2e-4, 10, 5, 1000, LiftMode::frozen_kappa, 103, true, false, 0};
    const MacroTrajectory traj =
        run_coarse(restrict_ensemble(init, spec), FlowSchedule::constant(2.0), cfg, 0.02, init);
    REQUIRE(traj.size() == 11);
    const double macro_dt = 10 * 2e-4;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.times[i] == doctest::Approx(i * macro_dt).epsilon(1e-12));
        CHECK(traj.states[i].values[0] > 0.0);
        CHECK(traj.states[i].values[0] < p.b);
    }
    // t_end = 0 keeps only the initial state
    const MacroTrajectory empty =
        run_coarse(restrict_ensemble(init, spec), FlowSchedule::constant(2.0), cfg, 0.0, init);
    CHECK(empty.size() == 1);
}

TEST_CASE("micro reference records only what the strategy asks") {
    const ModelParams p = fene49();
    const Ensemble init = sample_equilibrium(500, p, 105);
    const FlowSchedule flow = FlowSchedule::constant(2.0);
    const MacroTrajectory one =
        run_micro_reference(init, flow, 1e-3, 0.05, StrategySpec::even_moments(1, p), 105, 10);
    const MacroTrajectory two =
        run_micro_reference(init, flow, 1e-3, 0.05, StrategySpec::even_moments(2, p), 105, 10);
    REQUIRE(one.size() == two.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one.states[i].values[0] == two.states[i].values[0]); // same trajectory
        CHECK(two.states[i].values.size() == 2);
    }
}

TEST_CASE("FENE-P micro reference tracks the closed ODE") {
    ModelParams p = fene49();
    p.force_model = ForceModel::fenep;
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const Ensemble init = sample_equilibrium(20000, p, 107);
    const FlowSchedule flow = FlowSchedule::complex();
    // dt = 1e-3 keeps the Euler-Maruyama weak error below the 2% band
    const double dt = 1e-3;
    const MacroTrajectory traj = run_micro_reference(init, flow, dt, 2.0, spec, 107, 100);
    const FenepTrajectory oracle = fenep_integrate(49.0 / 52.0, flow, 1e-4, 2.0, p);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const std::size_t oi = static_cast<std::size_t>(std::lround(traj.times[i] / 1e-4));
        REQUIRE(oi < oracle.size());
        max_rel = std::max(max_rel,
                           std::abs(traj.states[i].values[0] - oracle.m[oi]) / oracle.m[oi]);
    }
    CHECK(max_rel < 0.02);
}

TEST_CASE("coarse runs are bit-identical across thread counts") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(2, p);
    const FlowSchedule flow = FlowSchedule::constant(2.0);
    CoarseConfig cfg{spec, 2e-4, 5, 10, 3000, LiftMode::frozen_kappa, 11, true, false, 0};
    const int saved = num_threads();
    set_num_threads(1);
    const Ensemble init1 = sample_equilibrium(3000, p, 11);
    const MacroTrajectory a = run_coarse(restrict_ensemble(init1, spec), flow, cfg, 0.01, init1);
    set_num_threads(3);
    const Ensemble init2 = sample_equilibrium(3000, p, 11);
    const MacroTrajectory b = run_coarse(restrict_ensemble(init2, spec), flow, cfg, 0.01, init2);
    set_num_threads(saved);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.states[i].values == b.states[i].values);
        CHECK(a.stress[i] == b.stress[i]);
    }
}
