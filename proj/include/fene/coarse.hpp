// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fene/constrained.hpp"
#include "fene/flow.hpp"
#include "fene/observables.hpp"
#include "fene/sde.hpp"

namespace fene {

enum class LiftMode {
    frozen_kappa,      // constrained steps use kappa(t*)
    quasi_equilibrium, // constrained steps use kappa = 0
};

struct CoarseConfig {
    StrategySpec spec;
    double dt = 2e-4;          // microscopic step
    long k_steps = 1;          // K; macro step Delta t = K dt
    long m_inf = 50;           // constrained steps per lift
    std::size_t n_particles = 2000;
    LiftMode lift_mode = LiftMode::frozen_kappa;
    std::uint64_t seed = 0;
    // reuse the previous macro step's ensemble as the lift init (cheap,
    // feasible-or-near start); false -> fresh equilibrium sample per lift
    bool warm_start = true;
    bool stop_at_plateau = false;
    long plateau_window = 0;
};

struct MacroTrajectory {
    std::vector<double> times;
    std::vector<MacroState> states;
    std::vector<double> stress;                 // ensemble estimate tau_p(t)
    std::vector<double> stress_model;           // FENE-P closed form, when applicable
    std::vector<long> lift_steps;               // constrained steps used per macro step

    std::size_t size() const { return times.size(); }
    void write_csv(const std::string& path) const;
};

// Holds the microscopic state between macro steps so lifting can warm-start
// and simulate-phase noise stays aligned with the physical step index.
class CoarseStepper {
  public:
    CoarseStepper(MacroState m0, const FlowSchedule& schedule, const CoarseConfig& cfg,
                  std::optional<Ensemble> init = std::nullopt);

    // One lift -> simulate(K) -> restrict cycle; returns the new state and
    // appends to the trajectory.
    const MacroState& step();

    const MacroState& macro_state() const { return state_; }
    const Ensemble& ensemble() const { return ensemble_; }
    const MacroTrajectory& trajectory() const { return trajectory_; }
    double tau_p() const { return trajectory_.stress.back(); }

  private:
    FlowSchedule schedule_;
    CoarseConfig cfg_;
    MacroState state_;
    double t0_ = 0.0;
    Ensemble ensemble_;
    bool have_ensemble_ = false;
    long macro_index_ = 0;
    std::uint32_t lift_step_counter_ = 0;
    MacroTrajectory trajectory_;
};

// One coarse step from a macro state alone (cold start per cfg).
std::pair<MacroState, double> coarse_step(const MacroState& m, const FlowSchedule& schedule,
                                          const CoarseConfig& cfg);

// Repeats coarse_step from t = 0 to t_end with a fresh lift each macro step.
MacroTrajectory run_coarse(const MacroState& m0, const FlowSchedule& schedule,
                           const CoarseConfig& cfg, double t_end,
                           std::optional<Ensemble> init = std::nullopt);

// Plain microscopic reference: simulate and record the restriction every
// `record_every` steps (the macro grid of a matching coarse run).
MacroTrajectory run_micro_reference(Ensemble init, const FlowSchedule& schedule, double dt,
                                    double t_end, const StrategySpec& spec,
                                    std::uint64_t seed, long record_every = 1);

} // namespace fene
