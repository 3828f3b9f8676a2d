// SPDX-License-Identifier: Apache-2.0
// Exercises the shared-library surface end to end, the way an external
// consumer would: only fene_closure.h, status codes, opaque handles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fene_closure.h"

namespace {
struct ParamsGuard {
    fc_params* p = nullptr;
    ~ParamsGuard() { fc_params_free(p); }
};
} // namespace

TEST_CASE("version and error surface") {
    CHECK(std::string(fc_version()) == "0.1.0");
    fc_params* p = nullptr;
    CHECK(fc_params_create(-1.0, 1.0, 1.0, FC_FORCE_FENE, &p) == FC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(fc_last_error()).find("b must be > 0") != std::string::npos);
    CHECK(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENE, nullptr) == FC_ERR_NULL_POINTER);
}

TEST_CASE("force and density through the C surface") {
    ParamsGuard g;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENE, &g.p) == FC_OK);
    double f = 0.0;
    REQUIRE(fc_force(g.p, 3.5, nullptr, &f) == FC_OK);
    CHECK(f == doctest::Approx(3.5 / 0.75));
    CHECK(fc_force(g.p, 7.5, nullptr, &f) == FC_ERR_DOMAIN);

    ParamsGuard fp;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENEP, &fp.p) == FC_OK);
    CHECK(fc_force(fp.p, 1.0, nullptr, &f) == FC_ERR_MISSING_MOMENT);
    const double msq = 12.25;
    CHECK(fc_force(fp.p, 3.5, &msq, &f) == FC_OK);
    CHECK(f == doctest::Approx(3.5 / 0.75));

    double phi = -1.0;
    REQUIRE(fc_equilibrium_density(7.0, 49.0, &phi) == FC_OK);
    CHECK(phi == 0.0);
}

TEST_CASE("schedule handles") {
    fc_schedule* s = nullptr;
    REQUIRE(fc_schedule_complex(&s) == FC_OK);
    double k = 0.0;
    REQUIRE(fc_schedule_kappa(s, 0.5, &k) == FC_OK);
    CHECK(k == doctest::Approx(25.0 * std::exp(-2.0)));
    fc_schedule_free(s);

    const double ts[3] = {0.0, 1.0, 2.0};
    const double ks[3] = {0.0, 2.0, 0.0};
    REQUIRE(fc_schedule_tabulated(ts, ks, 3, &s) == FC_OK);
    REQUIRE(fc_schedule_kappa(s, 0.5, &k) == FC_OK);
    CHECK(k == doctest::Approx(1.0));
    fc_schedule_free(s);
}

TEST_CASE("simulate, restrict, stress, lift, histogram round trip") {
    ParamsGuard g;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENE, &g.p) == FC_OK);
    fc_strategy* strat = nullptr;
    REQUIRE(fc_strategy_create("even:2", g.p, &strat) == FC_OK);
    int nobs = 0;
    REQUIRE(fc_strategy_num_observables(strat, &nobs) == FC_OK);
    CHECK(nobs == 2);
    CHECK(fc_strategy_create("spline", g.p, &strat) == FC_ERR_PARSE);

    fc_ensemble* ens = nullptr;
    REQUIRE(fc_ensemble_sample_equilibrium(20000, g.p, 2026, 0, &ens) == FC_OK);
    fc_schedule* flow = nullptr;
    REQUIRE(fc_schedule_constant(2.0, &flow) == FC_OK);
    REQUIRE(fc_simulate(ens, flow, 2e-4, 500, 2026, 0) == FC_OK);
    double t = 0.0;
    REQUIRE(fc_ensemble_time(ens, &t) == FC_OK);
    CHECK(t == doctest::Approx(0.1));

    double values[2] = {0, 0};
    REQUIRE(fc_restrict(ens, strat, values) == FC_OK);
    CHECK(values[0] > 49.0 / 52.0); // stretched by the flow
    double tau = 0.0;
    REQUIRE(fc_stress(ens, g.p, &tau) == FC_OK);
    CHECK(tau > 0.0);

    // lift back onto the measured moments from an equilibrium init
    fc_lift_report* rep = nullptr;
    REQUIRE(fc_lift(values, 0.1, strat, 2.0, 2e-4, 200, 0, 0, 0, /*init_kind=*/1, nullptr, 20000,
                    7, &rep) == FC_OK);
    fc_ensemble* lifted = nullptr;
    REQUIRE(fc_lift_report_ensemble(rep, &lifted) == FC_OK);
    double lifted_values[2] = {0, 0};
    REQUIRE(fc_restrict(lifted, strat, lifted_values) == FC_OK);
    CHECK(lifted_values[0] ==
          doctest::Approx(values[0]).epsilon(1e-8)); // R o L = Id
    CHECK(lifted_values[1] == doctest::Approx(values[1]).epsilon(1e-8));
    long steps = 0, plateau = 0;
    REQUIRE(fc_lift_report_steps(rep, &steps, &plateau) == FC_OK);
    CHECK(steps == 200);
    size_t mlen = 0;
    REQUIRE(fc_lift_report_monitor_len(rep, &mlen) == FC_OK);
    CHECK(mlen == 200);

    fc_histogram* h = nullptr;
    REQUIRE(fc_histogram_bin(lifted, 100, &h) == FC_OK);
    fc_histogram* href = nullptr;
    REQUIRE(fc_histogram_bin(ens, 100, &href) == FC_OK);
    double d = -1.0;
    REQUIRE(fc_histogram_l1(h, href, &d) == FC_OK);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);

    fc_histogram_free(h);
    fc_histogram_free(href);
    fc_lift_report_free(rep);
    fc_ensemble_free(lifted);
    fc_ensemble_free(ens);
    fc_schedule_free(flow);
    fc_strategy_free(strat);
}

TEST_CASE("fenep oracle and qe oracle") {
    ParamsGuard g;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENEP, &g.p) == FC_OK);
    double v = 0.0;
    REQUIRE(fc_fenep_rhs(0.98, 0.0, g.p, &v) == FC_OK);
    CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(fc_fenep_stress(24.5, g.p, &v) == FC_OK);
    CHECK(v == doctest::Approx(48.0));

    fc_schedule* flow = nullptr;
    REQUIRE(fc_schedule_zero(&flow) == FC_OK);
    size_t len = 0;
    REQUIRE(fc_fenep_integrate(0.5, flow, 1e-3, 1.0, g.p, nullptr, nullptr, nullptr, 0, &len) ==
            FC_OK);
    CHECK(len == 1001);
    std::vector<double> m(len);
    REQUIRE(fc_fenep_integrate(0.5, flow, 1e-3, 1.0, g.p, nullptr, m.data(), nullptr, len,
                               &len) == FC_OK);
    CHECK(m.back() > 0.5);
    fc_schedule_free(flow);

    ParamsGuard fene;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENE, &fene.p) == FC_OK);
    fc_strategy* s1 = nullptr;
    REQUIRE(fc_strategy_create("even:1", fene.p, &s1) == FC_OK);
    const double target = 1.5;
    fc_qe_density* qe = nullptr;
    REQUIRE(fc_qe_solve(&target, s1, &qe) == FC_OK);
    double lambda = 0.0;
    REQUIRE(fc_qe_multipliers(qe, &lambda, 1) == FC_OK);
    CHECK(lambda > 0.0);
    double pdf = 0.0;
    REQUIRE(fc_qe_pdf(qe, 0.0, &pdf) == FC_OK);
    CHECK(pdf > 0.0);
    const double bad = 49.0;
    fc_qe_density* qe2 = nullptr;
    CHECK(fc_qe_solve(&bad, s1, &qe2) == FC_ERR_INFEASIBLE_MOMENTS);
    fc_qe_free(qe);
    fc_strategy_free(s1);
}

TEST_CASE("coarse trajectory through the C surface") {
    ParamsGuard g;
    REQUIRE(fc_params_create(49.0, 1.0, 1.0, FC_FORCE_FENE, &g.p) == FC_OK);
    fc_strategy* strat = nullptr;
    REQUIRE(fc_strategy_create("even:1", g.p, &strat) == FC_OK);
    fc_schedule* flow = nullptr;
    REQUIRE(fc_schedule_constant(2.0, &flow) == FC_OK);
    fc_ensemble* init = nullptr;
    REQUIRE(fc_ensemble_sample_equilibrium(1000, g.p, 5, 0, &init) == FC_OK);
    double m0 = 0.0;
    REQUIRE(fc_restrict(init, strat, &m0) == FC_OK);

    fc_trajectory* traj = nullptr;
    REQUIRE(fc_run_coarse(&m0, 0.0, strat, flow, 2e-4, 10, 5, 1000, FC_LIFT_FROZEN_KAPPA, 1, 5,
                          0.01, init, &traj) == FC_OK);
    size_t len = 0;
    REQUIRE(fc_trajectory_len(traj, &len) == FC_OK);
    CHECK(len == 6);
    std::vector<double> times(len), m1(len), tau(len);
    REQUIRE(fc_trajectory_column(traj, 0, times.data(), len) == FC_OK);
    REQUIRE(fc_trajectory_column(traj, 1, m1.data(), len) == FC_OK);
    REQUIRE(fc_trajectory_column(traj, 2, tau.data(), len) == FC_OK);
    CHECK(times.back() == doctest::Approx(0.01));
    CHECK(fc_trajectory_column(traj, 9, times.data(), len) == FC_ERR_INVALID_ARGUMENT);

    const char* csv = "capi_traj.csv";
    REQUIRE(fc_trajectory_write_csv(traj, csv) == FC_OK);
    CHECK(std::filesystem::exists(csv));
    std::filesystem::remove(csv);

    fc_trajectory_free(traj);
    fc_ensemble_free(init);
    fc_schedule_free(flow);
    fc_strategy_free(strat);
}

TEST_CASE("experiment runner and presets") {
    CHECK(fc_preset_count() == 10);
    CHECK(std::string(fc_preset_name(0)) == "fig1");
    CHECK(fc_preset_text("fig3") != nullptr);
    CHECK(fc_preset_text("fig999") == nullptr);
    CHECK(fc_preset_name(99) == nullptr);

    CHECK(fc_config_validate("[model]\nb = -3\n", nullptr, 0) == FC_ERR_PARSE);
    char token[32];
    REQUIRE(fc_config_validate("[run]\nstrategy = even\nL = 2\n", token, sizeof token) == FC_OK);
    CHECK(std::string(token) == "even:2");

    const char* cfg =
        "experiment = qe_compare\n[flow]\nkappa = constant:2\n[run]\nstrategy = even:1\n"
        "n_particles = 400\ndt = 1e-3\nt_star = 0.05\nm_inf = 60\nseed = 9\n";
    const std::string out_dir = "capi_exp_out";
    std::filesystem::remove_all(out_dir);
    REQUIRE(fc_run_experiment(cfg, out_dir.c_str(), -1) == FC_OK);
    CHECK(std::filesystem::exists(out_dir + "/manifest.json"));
    CHECK(std::filesystem::exists(out_dir + "/qe_density.csv"));
    std::filesystem::remove_all(out_dir);
}
