// SPDX-License-Identifier: Apache-2.0
#include "fene/histio.hpp"

#include <cmath>
#include <string>

#include "fene/errors.hpp"
#include "fene/parallel.hpp"
#include "fene/qe_oracle.hpp"
#include "fene/quadrature.hpp"

namespace fene {

double Histogram::mass(int i) const {
    return static_cast<double>(counts.at(i)) / static_cast<double>(n_samples());
}

double Histogram::density(int i) const { return mass(i) / bin_width(); }

Histogram bin_ensemble(const Ensemble& ensemble, int n_bins) {
    if (n_bins < 1) throw InvalidArgumentError("bin_ensemble: n_bins must be >= 1");
    const std::size_t n = ensemble.size();
    if (n == 0) throw InvalidArgumentError("bin_ensemble: empty ensemble");
    Histogram h;
    h.b = ensemble.params.b;
    const double r = std::sqrt(h.b);
    const double width = 2.0 * r / n_bins;
    h.edges.resize(n_bins + 1);
    for (int i = 0; i <= n_bins; ++i) h.edges[i] = -r + width * i;
    h.edges.back() = r;

    // per-worker partial counts merged in block order (integer, exact)
    const double* x = ensemble.configs.data();
    const std::size_t k = static_cast<std::size_t>(n_bins) + 2; // + under/overflow
    auto sums = block_sum(n, k, [&](std::size_t i, double* acc) {
        const double v = x[i];
        if (v < -r) {
            acc[n_bins] += 1.0;
        } else if (v > r) {
            acc[n_bins + 1] += 1.0;
        } else {
            int idx = static_cast<int>((v + r) / width);
            if (idx >= n_bins) idx = n_bins - 1; // right edge closes the last bin
            acc[idx] += 1.0;
        }
    });
    h.counts.resize(n_bins);
    for (int i = 0; i < n_bins; ++i) {
        h.counts[i] = static_cast<std::int64_t>(std::llround(sums[i]));
        h.n_total += h.counts[i];
    }
    h.underflow = static_cast<std::int64_t>(std::llround(sums[n_bins]));
    h.overflow = static_cast<std::int64_t>(std::llround(sums[n_bins + 1]));
    return h;
}

namespace {
void check_binning(const Histogram& a, const Histogram& b) {
    if (a.n_bins() != b.n_bins() || a.edges.front() != b.edges.front() ||
        a.edges.back() != b.edges.back()) {
        throw BinMismatchError("l1_distance: histograms use different binning");
    }
}
} // namespace

double l1_distance(const Histogram& h, const Histogram& ref) {
    check_binning(h, ref);
    double d = 0.0;
    for (int i = 0; i < h.n_bins(); ++i) d += std::abs(h.mass(i) - ref.mass(i));
    const double nh = static_cast<double>(h.n_samples());
    const double nr = static_cast<double>(ref.n_samples());
    d += std::abs(h.underflow / nh - ref.underflow / nr);
    d += std::abs(h.overflow / nh - ref.overflow / nr);
    return d;
}

double l1_distance(const Histogram& h, const QEDensity& ref) {
    double d = 0.0;
    double tail = 1.0; // density mass not covered by the histogram range
    for (int i = 0; i < h.n_bins(); ++i) {
        const double lo = std::max(h.edges[i], ref.domain_lo());
        const double hi = std::min(h.edges[i + 1], ref.domain_hi());
        double q = 0.0;
        if (hi > lo) {
            q = adaptive_gauss_legendre([&ref](double x) { return ref.pdf(x); }, lo, hi, 1e-8,
                                        1e-12);
        }
        tail -= q;
        d += std::abs(h.mass(i) - q);
    }
    const double nh = static_cast<double>(h.n_samples());
    d += std::abs(h.underflow / nh) + std::abs(h.overflow / nh) + std::abs(tail);
    return d;
}

double batch_se(const std::vector<double>& series, int n_batches) {
    if (n_batches < 2) throw TooFewBatchesError("batch_se: need at least 2 batches");
    const std::size_t len = series.size();
    const std::size_t blen = len / static_cast<std::size_t>(n_batches);
    if (blen < 1) {
        throw TooFewBatchesError("batch_se: series of length " + std::to_string(len) +
                                 " cannot fill " + std::to_string(n_batches) + " batches");
    }
    const std::size_t start = len - blen * n_batches; // keep the most recent entries
    std::vector<double> means(n_batches, 0.0);
    for (int j = 0; j < n_batches; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < blen; ++i) s += series[start + j * blen + i];
        means[j] = s / static_cast<double>(blen);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= n_batches;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (n_batches - 1);
    return std::sqrt(var / n_batches);
}

} // namespace fene
