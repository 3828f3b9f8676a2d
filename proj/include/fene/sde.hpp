// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "fene/ensemble.hpp"
#include "fene/flow.hpp"
#include "fene/model.hpp"
#include "fene/rng.hpp"

namespace fene {

// Identifies the noise of one ensemble step. Physical steps use
// Phase::simulate with the global step index, so a coarse run and a plain
// micro run with the same seed share their simulate-phase increments.
struct NoiseKey {
    std::uint64_t seed = 0;
    rng::Phase phase = rng::Phase::simulate;
    std::uint32_t step = 0;
};

inline constexpr int kRejectionRetryCap = 1000;

// One explicit Euler-Maruyama trial move,
//   x' = x + [kappa x - F(x)/(2 We)] dt + sqrt(dt/We) xi.
double em_step(double x, double kappa_val, double dt, double xi, const ModelParams& params,
               std::optional<double> msq = std::nullopt);

// Advances every particle by one step of size dt with kappa evaluated at the
// ensemble clock (left endpoint). FENE particles violating
// x^2 <= (1 - sqrt(dt)) b redraw xi until acceptance (cap kRejectionRetryCap);
// FENE-P freezes <X^2> at its pre-step value and applies no rejection.
Ensemble ensemble_step(const Ensemble& ens, const FlowSchedule& schedule, double dt,
                       const NoiseKey& key);

// k_steps applications of ensemble_step; step i uses noise step_index
// start_step + i and kappa at the left endpoint of its substep.
Ensemble simulate(Ensemble ens, const FlowSchedule& schedule, double dt, long k_steps,
                  std::uint64_t seed, std::uint32_t start_step = 0);

// FENE accept-reject bound (1 - sqrt(dt)) b.
double fene_step_bound(double dt, const ModelParams& params);

} // namespace fene
