// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "fene/errors.hpp"
#include "fene/histio.hpp"
#include "fene/qe_oracle.hpp"
#include "fene/quadrature.hpp"
#include "fene/rng.hpp"

using namespace fene;

namespace {
ModelParams fene49() { return ModelParams{49.0, 1.0, 1.0, ForceModel::fene}; }

Ensemble make_ensemble(std::vector<double> xs, ModelParams p = fene49()) {
    Ensemble e;
    e.configs = std::move(xs);
    e.params = p;
    return e;
}
} // namespace

TEST_CASE("binning conventions") {
    // left-closed bins: a particle exactly at 0 lands in the right-of-zero
    // bin when n_bins is even
    const Histogram h = bin_ensemble(make_ensemble({0.0}), 10);
    CHECK(h.counts[5] == 1);
    CHECK(h.n_total == 1);
    // the right edge is closed
    const Histogram h2 = bin_ensemble(make_ensemble({7.0, -7.0}), 10);
    CHECK(h2.counts[9] == 1);
    CHECK(h2.counts[0] == 1);
    CHECK(h2.overflow == 0);

    // symmetric ensembles give mirrored counts
    const Histogram h3 = bin_ensemble(make_ensemble({1.3, -1.3, 4.4, -4.4}), 50);
    for (int i = 0; i < 50; ++i) CHECK(h3.counts[i] == h3.counts[49 - i]);
}

TEST_CASE("FENE-P mass beyond sqrt(b) lands in overflow cells") {
    ModelParams p = fene49();
    p.force_model = ForceModel::fenep;
    const Histogram h = bin_ensemble(make_ensemble({0.0, 7.5, -8.0}, p), 10);
    CHECK(h.n_total == 1);
    CHECK(h.overflow == 1);
    CHECK(h.underflow == 1);
    CHECK(h.n_samples() == 3);
}

TEST_CASE("mass is conserved under permutation") {
    Ensemble a = sample_equilibrium(20000, fene49(), 3);
    Ensemble b = a;
    std::reverse(b.configs.begin(), b.configs.end());
    const Histogram ha = bin_ensemble(a, 100);
    const Histogram hb = bin_ensemble(b, 100);
    CHECK(ha.counts == hb.counts);
}

TEST_CASE("equilibrium histogram matches phi_eq per-bin masses") {
    const ModelParams p = fene49();
    const Ensemble ens = sample_equilibrium(100000, p, 7);
    const Histogram h = bin_ensemble(ens, 100);
    const EquilibriumDensity eq(p.b);
    double l1 = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double q = adaptive_gauss_legendre([&eq](double x) { return eq(x); }, h.edges[i],
                                                 h.edges[i + 1], 1e-9, 1e-14);
        l1 += std::abs(h.mass(i) - q);
    }
    CHECK(l1 < 0.02);
}

TEST_CASE("l1 distance properties") {
    const ModelParams p = fene49();
    const Ensemble a = sample_equilibrium(50000, p, 11, 0);
    const Ensemble b = sample_equilibrium(50000, p, 11, 1);
    const Histogram ha = bin_ensemble(a, 100);
    const Histogram hb = bin_ensemble(b, 100);
    CHECK(l1_distance(ha, ha) == 0.0);
    CHECK(l1_distance(ha, hb) == l1_distance(hb, ha));
    CHECK(l1_distance(ha, hb) < 0.03); // same-law samples at N = 5e4

    // disjoint supports saturate the distance at 2
    const Histogram hl = bin_ensemble(make_ensemble({-6.0, -5.5}), 10);
    const Histogram hr = bin_ensemble(make_ensemble({6.0, 5.5}), 10);
    CHECK(l1_distance(hl, hr) == doctest::Approx(2.0));

    // triangle inequality over shared-edge histograms
    const Histogram hc = bin_ensemble(sample_equilibrium(50000, p, 11, 2), 100);
    CHECK(l1_distance(ha, hb) <= l1_distance(ha, hc) + l1_distance(hc, hb) + 1e-14);

    const Histogram coarse = bin_ensemble(a, 50);
    CHECK_THROWS_AS(l1_distance(ha, coarse), BinMismatchError);
}

TEST_CASE("l1 distance against a continuous density") {
    const ModelParams p = fene49();
    const StrategySpec spec = StrategySpec::even_moments(1, p);
    const QEDensity eq_density = qe_solve(MacroState{{49.0 / 52.0}, spec, 0.0}, spec, p);
    const Histogram h = bin_ensemble(sample_equilibrium(100000, p, 13), 100);
    CHECK(l1_distance(h, eq_density) < 0.02);
}

TEST_CASE("batch_se on constant and i.i.d. series") {
    CHECK(batch_se(std::vector<double>(1000, 3.14), 10) == 0.0);

    std::vector<double> normals(10000);
    for (std::size_t i = 0; i < normals.size(); ++i) {
        normals[i] = rng::normal(2027, rng::Phase::init, 0, i, 0);
    }
    const double se = batch_se(normals, 20);
    CHECK(se == doctest::Approx(0.01).epsilon(0.5)); // 1/sqrt(n) within 50%

    CHECK_THROWS_AS(batch_se(normals, 1), TooFewBatchesError);
    CHECK_NOTHROW(batch_se(std::vector<double>{1.0, 2.0}, 2));
    CHECK_THROWS_AS(batch_se(std::vector<double>{1.0}, 2), TooFewBatchesError);
}
