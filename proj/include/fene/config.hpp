// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fene/coarse.hpp"
#include "fene/flow.hpp"
#include "fene/model.hpp"

namespace fene {

enum class ExperimentKind {
    fenep_lift,          // constrained reconstruction of a FENE-P state
    fenep_coarse,        // FENE-P coarse stepper vs micro, several Delta t
    fene_lift,           // lifted FENE distributions vs reference, per L
    qe_compare,          // frozen-kappa vs quasi-equilibrium lift monitors
    fene_coarse_startup, // coarse stepper under constant elongational flow
    fene_coarse_complex, // coarse stepper under the complex flow
};

const char* to_string(ExperimentKind kind);

// Flat key-value configuration with [model], [flow] and [run] sections.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::fene_lift;
    ModelParams params;                     // [model] b, we, eps, force
    std::string flow_token = "constant:2";  // [flow] kappa
    std::string strategy_token = "even:4";  // [run] strategy (plus optional L)
    std::size_t n_particles = 50000;
    double dt = 2e-4;
    long k_steps = 1;
    long m_inf = 50;
    double t_star = 1.0;
    double t_end = 4.0;
    std::uint64_t seed = 2026;
    LiftMode lift_mode = LiftMode::frozen_kappa;
    bool warm_start = true;
    int n_bins = 100;
    bool plateau_stop = false;
    long plateau_window = 0;

    FlowSchedule make_flow() const;
    StrategySpec make_strategy() const;
};

// Parses and range-checks a config document. Unknown sections or keys are
// rejected with line diagnostics; an empty document yields the defaults.
ExperimentConfig validate_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct Preset {
    const char* name;
    const char* description;
    const char* text;
};

// Checked-in experiment presets, one per reproduced figure.
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

} // namespace fene
