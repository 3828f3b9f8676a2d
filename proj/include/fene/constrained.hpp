// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fene/ensemble.hpp"
#include "fene/observables.hpp"
#include "fene/sde.hpp"

namespace fene {

// Result of one Lagrange-multiplier projection onto the moment manifold.
struct ProjectionResult {
    Ensemble ensemble;
    std::vector<double> multipliers;
    int newton_iters = 0;
    // max_l |R_l - M_l| / max(1, |M_l|) at the solution
    double residual = 0.0;
};

// Newton tolerance on the scaled constraint residual.
inline constexpr double kProjectionTol = 1e-10;

// Projects `trial` onto {R(X) = target} along the restriction gradients
// evaluated at `prev` (the pre-step state):
//   X(L) = trial + sum_l lambda_l grad R_l(prev),
// with Lambda solved by damped Newton started at Lambda = 0. A trial that
// already satisfies the target is returned unchanged (Lambda = 0).
ProjectionResult project(const Ensemble& prev, const Ensemble& trial, const MacroState& target,
                         const StrategySpec& spec);

// One constrained step at frozen velocity gradient: an unconstrained
// Euler-Maruyama trial move followed by projection. If the projected state
// of any particle is unphysical (FENE bound violated), only that particle's
// noise is redrawn and the whole-ensemble projection is re-solved (cap 100
// rounds). The physical clock stays frozen. Multiplier/iteration/round
// diagnostics of the last call can be read from the returned ensemble's
// restriction residual (kept <= kProjectionTol).
Ensemble constrained_step(const Ensemble& ens, const MacroState& target,
                          const StrategySpec& spec, double kappa_frozen, double dt,
                          const NoiseKey& key);

struct LiftOptions {
    double kappa_frozen = 0.0;
    double dt = 2e-4;
    long m_inf = 50;            // constrained steps to run (upper bound)
    bool stop_at_plateau = false;
    long plateau_window = 0;    // 0 -> max(20, m_inf/10)
    std::uint32_t lift_step_base = 0; // starting lift-phase RNG step counter
};

// Initial ensemble for lifting: a given ensemble, a fresh equilibrium
// sample, or i.i.d. uniform draws on the admissible interval.
struct LiftInit {
    enum class Kind { given, equilibrium, uniform };
    Kind kind = Kind::equilibrium;
    Ensemble ens;    // kind == given
    std::size_t n = 0;

    static LiftInit given(Ensemble e);
    static LiftInit equilibrium(std::size_t n);
    static LiftInit uniform(std::size_t n);
};

struct LiftReport {
    Ensemble ensemble;
    long steps_run = 0;
    // per-step monitor: tau_p when the stress is not constrained, otherwise
    // the first unconstrained even moment
    std::vector<double> monitor;
    long plateau_step = -1; // first step at which the plateau detector fired
    std::uint32_t next_lift_step = 0;
};

// The lifting operator: projects the init ensemble onto the constraint set,
// then runs m_inf constrained steps at frozen kappa. By construction
// restrict_ensemble(lift(M).ensemble) == M to the Newton tolerance.
LiftReport lift(const MacroState& target, const StrategySpec& spec, const LiftOptions& options,
                const LiftInit& init, std::uint64_t seed);

// lift with kappa_frozen = 0; with identical seeds this reproduces the
// quasi-equilibrium reconstruction bit for bit.
LiftReport quasi_equilibrium_lift(const MacroState& target, const StrategySpec& spec,
                                  LiftOptions options, const LiftInit& init, std::uint64_t seed);

} // namespace fene
