// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fene/flow.hpp"
#include "fene/model.hpp"

namespace fene {

// Closed macroscopic FENE-P model for the conformation scalar M = <X^2>:
//   dM/dt = 2 kappa M - (1/We) M/(1 - M/b) + 1/We
// with stress tau_p = (eps/We)(M/(1 - M/b) - 1). Deterministic reference for
// consistency tests against the stochastic FENE-P ensemble.

struct FenepState {
    double m = 0.0;
    double t = 0.0;
};

struct FenepTrajectory {
    std::vector<double> times;
    std::vector<double> m;
    std::vector<double> tau;

    std::size_t size() const { return times.size(); }
};

double fenep_rhs(double m, double kappa_val, const ModelParams& params);
double fenep_stress(double m, const ModelParams& params);

// Classical 4th-order one-step integration at fixed dt; records every step.
// Throws DomainError if the trajectory leaves (0, b), which signals that dt
// is too large.
FenepTrajectory fenep_integrate(double m0, const FlowSchedule& schedule, double dt, double t_end,
                                const ModelParams& params);

} // namespace fene
