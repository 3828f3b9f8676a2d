// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fene/errors.hpp"
#include "fene/parallel.hpp"
#include "fene/sde.hpp"

using namespace fene;

namespace {
ModelParams fene49() { return ModelParams{49.0, 1.0, 1.0, ForceModel::fene}; }

// scalar reference implementation of one ensemble step with the accept-reject
// rule, replaying the exact draw sequence of ensemble_step
double reference_step(double x, double kappa_val, double dt, const ModelParams& p,
                      const NoiseKey& key, std::uint32_t particle, int sign = +1) {
    const double bound = fene_step_bound(dt, p);
    const double drift = (kappa_val * x - force(x, p) / (2.0 * p.we)) * dt;
    const double sigma = std::sqrt(dt / p.we);
    std::uint32_t draw = 0;
    double trial;
    do {
        const double xi = sign * rng::normal(key.seed, key.phase, key.step, particle, draw++);
        trial = x + drift + sigma * xi;
    } while (trial * trial > bound);
    return trial;
}
} // namespace

TEST_CASE("em_step examples") {
    const ModelParams p = fene49();
    CHECK(em_step(0.0, 0.0, 1e-2, 0.0, p) == 0.0);
    // 1 + (2 - (49/48)/2) * 2e-4
    CHECK(em_step(1.0, 2.0, 2e-4, 0.0, p) ==
          doctest::Approx(1.000297917).epsilon(1e-9));
    ModelParams hook = p;
    hook.force_model = ForceModel::hookean;
    CHECK(em_step(1.0, 0.0, 0.01, 1.0, hook) == doctest::Approx(1.095).epsilon(1e-12));
    CHECK_THROWS_AS(em_step(7.0, 0.0, 1e-2, 0.0, p), DomainError);
}

TEST_CASE("em_step sign equivariance") {
    const ModelParams p = fene49();
    for (double x : {0.3, 1.7, 4.4}) {
        for (double xi : {-0.8, 0.0, 1.9}) {
            CHECK(em_step(-x, 2.0, 1e-3, -xi, p) ==
                  doctest::Approx(-em_step(x, 2.0, 1e-3, xi, p)).epsilon(1e-15));
        }
    }
}

TEST_CASE("ensemble_step enforces the FENE bound") {
    const ModelParams p = fene49();
    Ensemble ens = sample_equilibrium(10000, p, 5);
    // stretch the ensemble toward the bound to provoke rejections
    for (auto& x : ens.configs) x *= 2.5;
    const double dt = 2e-4;
    const Ensemble out = ensemble_step(ens, FlowSchedule::constant(2.0), dt, {5, rng::Phase::simulate, 0});
    const double bound = (1.0 - std::sqrt(dt)) * 49.0; // 48.3070
    CHECK(bound == doctest::Approx(48.3070).epsilon(1e-4));
    double max_sq = 0.0;
    for (const double x : out.configs) max_sq = std::max(max_sq, x * x);
    CHECK(max_sq <= bound);
    CHECK(out.time == doctest::Approx(dt));
}

TEST_CASE("ensemble_step matches the scalar reference implementation") {
    const ModelParams p = fene49();
    Ensemble ens = sample_equilibrium(500, p, 17);
    for (auto& x : ens.configs) x *= 2.0;
    const NoiseKey key{17, rng::Phase::simulate, 0};
    const double dt = 2e-4;
    const Ensemble out = ensemble_step(ens, FlowSchedule::constant(2.0), dt, key);
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double ref = reference_step(ens.configs[i], 2.0, dt, p, key, i);
        CHECK(out.configs[i] == ref);
    }
}

TEST_CASE("trajectory sign equivariance under negated noise") {
    // negating the state and every Brownian increment negates the step; the
    // accept-reject rule is symmetric so the retry sequence aligns
    const ModelParams p = fene49();
    Ensemble ens = sample_equilibrium(300, p, 23);
    for (auto& x : ens.configs) x *= 2.0;
    const NoiseKey key{23, rng::Phase::simulate, 4};
    const double dt = 2e-4;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double plus = reference_step(ens.configs[i], 0.0, dt, p, key, i, +1);
        const double minus = reference_step(-ens.configs[i], 0.0, dt, p, key, i, -1);
        CHECK(minus == doctest::Approx(-plus).epsilon(1e-15));
    }
}

TEST_CASE("zero-noise Hookean drift contracts monotonically") {
    ModelParams hook = fene49();
    hook.force_model = ForceModel::hookean;
    double x = 3.0;
    for (int k = 0; k < 100; ++k) {
        const double next = em_step(x, 0.0, 0.05, 0.0, hook);
        CHECK(std::abs(next) < std::abs(x));
        x = next;
    }
    CHECK(x > 0.0);
}

TEST_CASE("FENE-P relaxes toward b/(b+1)") {
    ModelParams p = fene49();
    p.force_model = ForceModel::fenep;
    Ensemble ens = sample_equilibrium(20000, p, 31); // <X^2> = b/(b+3)
    ens = simulate(std::move(ens), FlowSchedule::zero(), 1e-2, 1000, 31);
    // fixed point of the closed FENE-P equation at kappa = 0 is b/(b+1) = 0.98;
    // the Euler-Maruyama recursion at dt = 1e-2 shifts it to ~0.98245
    const double msq = ens.mean_square();
    CHECK(msq == doctest::Approx(0.98).epsilon(0.02));
    const double se = std::sqrt(2.0 * 0.98 * 0.98 / 20000.0); // Gaussian: var(X^2) = 2 v^2
    CHECK(std::abs(msq - 0.98245) < 3.0 * se);
}

TEST_CASE("simulate with zero steps is the identity") {
    const ModelParams p = fene49();
    const Ensemble ens = sample_equilibrium(100, p, 3);
    const Ensemble out = simulate(ens, FlowSchedule::constant(2.0), 1e-3, 0, 3);
    CHECK(out.configs == ens.configs);
    CHECK(out.time == ens.time);
}

TEST_CASE("results are bit-identical across thread counts") {
    const ModelParams p = fene49();
    const int saved = num_threads();
    set_num_threads(1);
    Ensemble a = simulate(sample_equilibrium(5000, p, 77), FlowSchedule::constant(2.0), 2e-4,
                          200, 77);
    set_num_threads(4);
    Ensemble b = simulate(sample_equilibrium(5000, p, 77), FlowSchedule::constant(2.0), 2e-4,
                          200, 77);
    set_num_threads(saved);
    CHECK(a.configs == b.configs);
}

TEST_CASE("weak order: Hookean second moment vs the exact EM recursion") {
    // For dX = -X/(2We) dt + dW/sqrt(We), E[X_k^2] obeys the closed recursion
    // v_{k+1} = v_k (1 - dt/2)^2 + dt exactly under Euler-Maruyama; the Monte
    // Carlo run must match it to sampling accuracy, and the recursion's
    // distance to the OU law 1 - e^{-t} halves with dt.
    ModelParams hook = fene49();
    hook.force_model = ForceModel::hookean;

    auto em_var = [](double dt, double t_end) {
        double v = 0.0;
        const long n = std::lround(t_end / dt);
        for (long k = 0; k < n; ++k) v = v * (1.0 - dt / 2.0) * (1.0 - dt / 2.0) + dt;
        return v;
    };
    const double exact = 1.0 - std::exp(-1.0);
    const double e1 = std::abs(em_var(0.02, 1.0) - exact);
    const double e2 = std::abs(em_var(0.01, 1.0) - exact);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1)); // first weak order

    // MC at dt = 0.02 agrees with the recursion within 3 sigma
    const std::size_t n = 200000;
    Ensemble ens;
    ens.params = hook;
    ens.configs.assign(n, 0.0);
    ens = simulate(std::move(ens), FlowSchedule::zero(), 0.02, 50, 123);
    const double v_mc = ens.mean_square();
    const double v_th = em_var(0.02, 1.0);
    const double se = std::sqrt(2.0 * v_th * v_th / n); // Gaussian X: var(X^2) = 2 v^2
    CHECK(std::abs(v_mc - v_th) < 3.0 * se);
}

TEST_CASE("rejection overflow reports oversized steps") {
    const ModelParams p = fene49();
    CHECK_THROWS_AS(fene_step_bound(1.5, p), InvalidArgumentError);
    // a particle parked at the bound with a huge dt cannot find an
    // acceptable move
    Ensemble ens;
    ens.params = p;
    ens.configs.assign(4, 6.8);
    CHECK_THROWS_AS(ensemble_step(ens, FlowSchedule::constant(60.0), 0.9, {1, rng::Phase::simulate, 0}),
                    RejectionOverflowError);
}
