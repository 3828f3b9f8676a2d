// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fene/errors.hpp"
#include "fene/flow.hpp"

using namespace fene;

TEST_CASE("constant and zero schedules") {
    const FlowSchedule c = FlowSchedule::constant(2.0);
    for (double t = 0.0; t < 5.0; t += 0.7) CHECK(c.kappa(t) == 2.0);
    CHECK(FlowSchedule::zero().kappa(3.0) == 0.0);
}

TEST_CASE("complex schedule values") {
    const FlowSchedule s = FlowSchedule::complex();
    CHECK(s.kappa(0.0) == 0.0);
    CHECK(s.kappa(1.0) == 0.0);
    CHECK(s.kappa(0.5) == doctest::Approx(25.0 * std::exp(-2.0)).epsilon(1e-12)); // 3.383382
}

TEST_CASE("complex schedule shape on [0,1]") {
    const FlowSchedule s = FlowSchedule::complex();
    int sign_changes = 0;
    double prev = s.kappa(0.0);
    double prev_diff = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const double v = s.kappa(t);
        CHECK(v >= 0.0);
        const double diff = v - prev;
        if (i > 1 && diff * prev_diff < 0.0) ++sign_changes;
        if (diff != 0.0) prev_diff = diff;
        prev = v;
    }
    CHECK(sign_changes == 1); // one interior maximum
}

TEST_CASE("tabulated schedule interpolates and clamps") {
    const FlowSchedule s = FlowSchedule::tabulated({0.0, 1.0, 3.0}, {0.0, 2.0, -2.0});
    CHECK(s.kappa(-1.0) == 0.0);
    CHECK(s.kappa(0.5) == doctest::Approx(1.0));
    CHECK(s.kappa(1.0) == doctest::Approx(2.0));
    CHECK(s.kappa(2.0) == doctest::Approx(0.0));
    CHECK(s.kappa(5.0) == -2.0);
    CHECK_THROWS_AS(FlowSchedule::tabulated({0.0, 0.0}, {1.0, 2.0}), InvalidArgumentError);
    CHECK_THROWS_AS(FlowSchedule::tabulated({}, {}), InvalidArgumentError);
}

TEST_CASE("tabulated schedule loads from csv") {
    const char* path = "flow_test.csv";
    {
        std::ofstream f(path);
        f << "t,kappa\n0,0\n0.5,1.5\n1.0,0\n";
    }
    const FlowSchedule s = FlowSchedule::from_csv(path);
    CHECK(s.kappa(0.25) == doctest::Approx(0.75));
    std::remove(path);
    CHECK_THROWS_AS(FlowSchedule::from_csv("no_such_file.csv"), IoError);
}
