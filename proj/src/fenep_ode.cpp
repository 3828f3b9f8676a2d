// SPDX-License-Identifier: Apache-2.0
#include "fene/fenep_ode.hpp"

#include <cmath>
#include <string>

#include "fene/errors.hpp"

namespace fene {

namespace {
void check_domain(double m, double b, const char* where) {
    if (!(m > 0.0) || !(m < b)) {
        throw DomainError(std::string(where) + ": conformation M = " + std::to_string(m) +
                          " outside (0, b)");
    }
}
} // namespace

double fenep_rhs(double m, double kappa_val, const ModelParams& params) {
    check_domain(m, params.b, "fenep_rhs");
    return 2.0 * kappa_val * m - m / ((1.0 - m / params.b) * params.we) + 1.0 / params.we;
}

double fenep_stress(double m, const ModelParams& params) {
    if (!(m >= 0.0) || !(m < params.b)) {
        throw DomainError("fenep_stress: conformation M = " + std::to_string(m) +
                          " outside [0, b)");
    }
    return params.eps / params.we * (m / (1.0 - m / params.b) - 1.0);
}

FenepTrajectory fenep_integrate(double m0, const FlowSchedule& schedule, double dt, double t_end,
                                const ModelParams& params) {
    if (!(dt > 0.0)) throw InvalidArgumentError("fenep_integrate: dt must be > 0");
    if (t_end < 0.0) throw InvalidArgumentError("fenep_integrate: t_end must be >= 0");
    check_domain(m0, params.b, "fenep_integrate");
    const long n = std::lround(t_end / dt);
    FenepTrajectory traj;
    traj.times.reserve(n + 1);
    traj.m.reserve(n + 1);
    traj.tau.reserve(n + 1);
    double m = m0;
    traj.times.push_back(0.0);
    traj.m.push_back(m);
    traj.tau.push_back(fenep_stress(m, params));
    for (long k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double k1 = fenep_rhs(m, schedule.kappa(t), params);
        const double k2 = fenep_rhs(m + 0.5 * dt * k1, schedule.kappa(t + 0.5 * dt), params);
        const double k3 = fenep_rhs(m + 0.5 * dt * k2, schedule.kappa(t + 0.5 * dt), params);
        const double k4 = fenep_rhs(m + dt * k3, schedule.kappa(t + dt), params);
        m += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_domain(m, params.b, "fenep_integrate");
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.m.push_back(m);
        traj.tau.push_back(fenep_stress(m, params));
    }
    return traj;
}

} // namespace fene
