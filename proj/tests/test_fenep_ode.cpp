// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fene/errors.hpp"
#include "fene/fenep_ode.hpp"
#include "fene/rng.hpp"

using namespace fene;

namespace {
ModelParams fenep49() { return ModelParams{49.0, 1.0, 1.0, ForceModel::fenep}; }
} // namespace

TEST_CASE("rhs values") {
    const ModelParams p = fenep49();
    CHECK(fenep_rhs(0.98, 0.0, p) == doctest::Approx(0.0).epsilon(1e-14)); // b/(b+1)
    CHECK(fenep_rhs(0.98, 2.0, p) == doctest::Approx(3.92).epsilon(1e-12));
    CHECK(fenep_rhs(48.99, 0.0, p) < -1e4); // strongly restoring near b
    CHECK_THROWS_AS(fenep_rhs(49.0, 0.0, p), DomainError);
    CHECK_THROWS_AS(fenep_rhs(-0.1, 0.0, p), DomainError);
}

TEST_CASE("stress values") {
    const ModelParams p = fenep49();
    CHECK(fenep_stress(0.98, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fenep_stress(0.0, p) == doctest::Approx(-1.0)); // -eps/We
    CHECK(fenep_stress(24.5, p) == doctest::Approx(48.0).epsilon(1e-12));
    ModelParams scaled = p;
    scaled.eps = 0.5;
    scaled.we = 2.0;
    CHECK(fenep_stress(24.5, scaled) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("stress is strictly increasing in m") {
    const ModelParams p = fenep49();
    double prev = fenep_stress(1e-6, p);
    for (double m = 0.5; m < 49.0; m += 0.5) {
        const double cur = fenep_stress(std::min(m, 48.9999), p);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("fixed point is preserved to machine precision") {
    const ModelParams p = fenep49();
    const double m0 = 49.0 / 50.0;
    const FenepTrajectory traj = fenep_integrate(m0, FlowSchedule::zero(), 1e-4, 2.0, p);
    for (const double m : traj.m) CHECK(m == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("monotone convergence to the fixed point at kappa = 0") {
    const ModelParams p = fenep49();
    for (const double m0 : {0.1, 3.0, 45.0}) {
        const FenepTrajectory traj = fenep_integrate(m0, FlowSchedule::zero(), 1e-3, 30.0, p);
        const double target = 0.98;
        for (std::size_t i = 1; i < traj.size(); ++i) {
            CHECK(std::abs(traj.m[i] - target) <= std::abs(traj.m[i - 1] - target) + 1e-12);
        }
        CHECK(traj.m.back() == doctest::Approx(target).epsilon(1e-6));
    }
}

TEST_CASE("self-convergence is fourth order") {
    const ModelParams p = fenep49();
    const FlowSchedule flow = FlowSchedule::complex();
    const double m0 = 49.0 / 52.0;
    const double ref = fenep_integrate(m0, flow, 6.25e-4 / 8.0, 2.0, p).m.back();
    const double e1 = std::abs(fenep_integrate(m0, flow, 5e-3, 2.0, p).m.back() - ref);
    const double e2 = std::abs(fenep_integrate(m0, flow, 2.5e-3, 2.0, p).m.back() - ref);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.35)); // ~2^4
}

TEST_CASE("(0,b) is forward-invariant under bounded random schedules") {
    const ModelParams p = fenep49();
    for (int trial = 0; trial < 10; ++trial) {
        // random piecewise-linear kappa with |kappa| <= 5
        std::vector<double> ts, ks;
        for (int i = 0; i <= 8; ++i) {
            ts.push_back(i * 0.25);
            ks.push_back(10.0 * rng::uniform(555, rng::Phase::init, trial, i, 0) - 5.0);
        }
        const FlowSchedule flow = FlowSchedule::tabulated(ts, ks);
        const double m0 = 0.2 + 48.0 * rng::uniform(555, rng::Phase::init, trial, 99, 0);
        const FenepTrajectory traj = fenep_integrate(m0, flow, 1e-4, 2.0, p);
        for (const double m : traj.m) {
            CHECK(m > 0.0);
            CHECK(m < p.b);
        }
    }
}

TEST_CASE("trajectory leaving the domain raises a domain error") {
    const ModelParams p = fenep49();
    // dt far too large: the Euler stages overshoot b under strong growth
    CHECK_THROWS_AS(fenep_integrate(40.0, FlowSchedule::constant(80.0), 0.5, 5.0, p),
                    DomainError);
}
