// SPDX-License-Identifier: Apache-2.0
#include "fene/coarse.hpp"

#include <cmath>

#include "fene/csvio.hpp"
#include "fene/errors.hpp"
#include "fene/fenep_ode.hpp"

namespace fene {
namespace {

void record(MacroTrajectory& traj, const MacroState& m, const Ensemble& ens, long lift_steps) {
    traj.times.push_back(m.time);
    traj.states.push_back(m);
    traj.stress.push_back(stress(ens, ens.params));
    if (ens.params.force_model == ForceModel::fenep) {
        traj.stress_model.push_back(fenep_stress(m.values.at(0), ens.params));
    }
    traj.lift_steps.push_back(lift_steps);
}

} // namespace

void MacroTrajectory::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    std::vector<std::string> header{"t"};
    const std::size_t L = states.empty() ? 0 : states.front().values.size();
    for (std::size_t l = 1; l <= L; ++l) header.push_back("M" + std::to_string(l));
    header.push_back("tau_p");
    if (!stress_model.empty()) header.push_back("tau_p_model");
    header.push_back("lift_steps_used");
    csv.row(header);
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (double v : states[i].values) row.push_back(v);
        row.push_back(stress[i]);
        if (!stress_model.empty()) row.push_back(stress_model[i]);
        row.push_back(static_cast<double>(lift_steps[i]));
        csv.row(row);
    }
}

CoarseStepper::CoarseStepper(MacroState m0, const FlowSchedule& schedule, const CoarseConfig& cfg,
                             std::optional<Ensemble> init)
    : schedule_(schedule), cfg_(cfg), state_(std::move(m0)), t0_(state_.time) {
    if (cfg_.k_steps < 1) throw InvalidArgumentError("coarse: k_steps must be >= 1");
    if (cfg_.n_particles < 1) throw InvalidArgumentError("coarse: n_particles must be >= 1");
    if (init) {
        if (init->size() != cfg_.n_particles) {
            throw DimensionMismatchError("coarse: init ensemble size != cfg.n_particles");
        }
        ensemble_ = std::move(*init);
        have_ensemble_ = true;
    } else {
        // an ensemble is needed for the t = 0 stress estimate (and as the
        // first warm start); a fresh equilibrium sample stands in
        ensemble_ = sample_equilibrium(cfg_.n_particles, cfg_.spec.params(), cfg_.seed,
                                       /*stream=*/0xFFFF0000u);
        have_ensemble_ = true;
    }
    ensemble_.time = t0_;
    record(trajectory_, state_, ensemble_, 0);
}

const MacroState& CoarseStepper::step() {
    const double t_star = t0_ + static_cast<double>(macro_index_ * cfg_.k_steps) * cfg_.dt;
    const double kappa_frozen =
        cfg_.lift_mode == LiftMode::quasi_equilibrium ? 0.0 : schedule_.kappa(t_star);

    LiftOptions opts;
    opts.kappa_frozen = kappa_frozen;
    opts.dt = cfg_.dt;
    opts.m_inf = cfg_.m_inf;
    opts.stop_at_plateau = cfg_.stop_at_plateau;
    opts.plateau_window = cfg_.plateau_window;
    opts.lift_step_base = lift_step_counter_;

    MacroState target = state_;
    target.time = t_star;
    LiftInit init = (cfg_.warm_start && have_ensemble_)
                        ? LiftInit::given(ensemble_)
                        : LiftInit::equilibrium(cfg_.n_particles);
    LiftReport report = lift(target, cfg_.spec, opts, init, cfg_.seed);
    lift_step_counter_ = report.next_lift_step;

    // K physical steps; the clock and the noise step index follow the global
    // physical grid, matching a plain micro run with the same seed exactly
    Ensemble ens = std::move(report.ensemble);
    for (long j = 0; j < cfg_.k_steps; ++j) {
        const long g = macro_index_ * cfg_.k_steps + j;
        ens.time = t0_ + static_cast<double>(g) * cfg_.dt;
        NoiseKey key{cfg_.seed, rng::Phase::simulate, static_cast<std::uint32_t>(g)};
        ens = ensemble_step(ens, schedule_, cfg_.dt, key);
        ens.time = t0_ + static_cast<double>(g + 1) * cfg_.dt;
    }
    ensemble_ = std::move(ens);
    have_ensemble_ = true;
    ++macro_index_;

    state_ = restrict_ensemble(ensemble_, cfg_.spec);
    record(trajectory_, state_, ensemble_, report.steps_run);
    return state_;
}

std::pair<MacroState, double> coarse_step(const MacroState& m, const FlowSchedule& schedule,
                                          const CoarseConfig& cfg) {
    CoarseStepper stepper(m, schedule, cfg);
    const MacroState& out = stepper.step();
    return {out, stepper.tau_p()};
}

MacroTrajectory run_coarse(const MacroState& m0, const FlowSchedule& schedule,
                           const CoarseConfig& cfg, double t_end, std::optional<Ensemble> init) {
    if (t_end < 0.0) throw InvalidArgumentError("run_coarse: t_end must be >= 0");
    CoarseStepper stepper(m0, schedule, cfg, std::move(init));
    const double macro_dt = static_cast<double>(cfg.k_steps) * cfg.dt;
    const long n_macro = std::lround(t_end / macro_dt);
    for (long i = 0; i < n_macro; ++i) stepper.step();
    return stepper.trajectory();
}

MacroTrajectory run_micro_reference(Ensemble init, const FlowSchedule& schedule, double dt,
                                    double t_end, const StrategySpec& spec, std::uint64_t seed,
                                    long record_every) {
    if (record_every < 1) throw InvalidArgumentError("run_micro_reference: record_every >= 1");
    const long n = std::lround(t_end / dt);
    MacroTrajectory traj;
    const double t0 = init.time;
    record(traj, restrict_ensemble(init, spec), init, 0);
    Ensemble ens = std::move(init);
    for (long k = 0; k < n; ++k) {
        ens.time = t0 + static_cast<double>(k) * dt;
        NoiseKey key{seed, rng::Phase::simulate, static_cast<std::uint32_t>(k)};
        ens = ensemble_step(ens, schedule, dt, key);
        ens.time = t0 + static_cast<double>(k + 1) * dt;
        if ((k + 1) % record_every == 0) {
            record(traj, restrict_ensemble(ens, spec), ens, 0);
        }
    }
    return traj;
}

} // namespace fene
