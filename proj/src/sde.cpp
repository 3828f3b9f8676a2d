// SPDX-License-Identifier: Apache-2.0
#include "fene/sde.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "fene/errors.hpp"
#include "fene/parallel.hpp"

namespace fene {

double fene_step_bound(double dt, const ModelParams& params) {
    const double factor = 1.0 - std::sqrt(dt);
    if (factor <= 0.0) {
        throw InvalidArgumentError("dt too large for the FENE accept-reject bound (needs dt < 1)");
    }
    return factor * params.b;
}

double em_step(double x, double kappa_val, double dt, double xi, const ModelParams& params,
               std::optional<double> msq) {
    if (!(dt > 0.0)) throw InvalidArgumentError("em_step: dt must be > 0");
    const double f = force(x, params, msq);
    return x + (kappa_val * x - f / (2.0 * params.we)) * dt + std::sqrt(dt / params.we) * xi;
}

Ensemble ensemble_step(const Ensemble& ens, const FlowSchedule& schedule, double dt,
                       const NoiseKey& key) {
    if (!(dt > 0.0)) throw InvalidArgumentError("ensemble_step: dt must be > 0");
    const std::size_t n = ens.size();
    if (n == 0) throw InvalidArgumentError("ensemble_step: empty ensemble");
    const ModelParams& p = ens.params;
    const double kappa_val = schedule.kappa(ens.time);
    const double sigma = std::sqrt(dt / p.we);
    const double inv_2we = 1.0 / (2.0 * p.we);

    std::optional<double> msq;
    double bound = 0.0;
    const bool reject = p.force_model == ForceModel::fene;
    if (reject) bound = fene_step_bound(dt, p);
    if (p.force_model == ForceModel::fenep) {
        msq = ens.mean_square();
        if (*msq >= p.b) {
            throw DomainError("ensemble_step: FENE-P <X^2> = " + std::to_string(*msq) +
                              " >= b; dt too large");
        }
    }

    Ensemble out = ens;
    out.time = ens.time + dt;
    const double* x = ens.configs.data();
    double* y = out.configs.data();
    std::atomic<bool> overflow{false};
    parallel_for_chunks(n, 2048, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double f = force(x[i], p, msq);
            const double drift = (kappa_val * x[i] - f * inv_2we) * dt;
            const auto particle = static_cast<std::uint32_t>(i);
            double trial = x[i] + drift +
                           sigma * rng::normal(key.seed, key.phase, key.step, particle, 0);
            if (reject) {
                std::uint32_t draw = 1;
                while (trial * trial > bound) {
                    if (draw > kRejectionRetryCap) {
                        overflow.store(true, std::memory_order_relaxed);
                        break;
                    }
                    trial = x[i] + drift +
                            sigma * rng::normal(key.seed, key.phase, key.step, particle, draw++);
                }
            }
            y[i] = trial;
        }
    });
    if (overflow.load()) {
        throw RejectionOverflowError(
            "ensemble_step: a particle exceeded " + std::to_string(kRejectionRetryCap) +
            " redraws; dt too large for the FENE bound");
    }
    return out;
}

Ensemble simulate(Ensemble ens, const FlowSchedule& schedule, double dt, long k_steps,
                  std::uint64_t seed, std::uint32_t start_step) {
    if (k_steps < 0) throw InvalidArgumentError("simulate: k_steps must be >= 0");
    const double t0 = ens.time;
    for (long k = 0; k < k_steps; ++k) {
        NoiseKey key{seed, rng::Phase::simulate, start_step + static_cast<std::uint32_t>(k)};
        ens = ensemble_step(ens, schedule, dt, key);
        // keep the clock an exact multiple of dt past t0
        ens.time = t0 + static_cast<double>(k + 1) * dt;
    }
    return ens;
}

} // namespace fene
