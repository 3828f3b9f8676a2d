// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fene/ensemble.hpp"

namespace fene {

class QEDensity;

// Uniform histogram over [-sqrt(b), sqrt(b)]. Bins are left-closed
// right-open, last bin closed. FENE-P configurations may leave the range;
// they are tracked in underflow/overflow and still count toward the
// normalization, so disjoint-support comparisons saturate the L1 distance.
struct Histogram {
    double b = 0.0;
    std::vector<double> edges;        // n_bins + 1, uniform
    std::vector<std::int64_t> counts; // per in-range bin
    std::int64_t underflow = 0;
    std::int64_t overflow = 0;
    std::int64_t n_total = 0;         // sum of in-range counts

    std::int64_t n_samples() const { return n_total + underflow + overflow; }
    int n_bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return edges[1] - edges[0]; }
    // normalized mass of bin i (relative to all samples)
    double mass(int i) const;
    // normalized density value of bin i (mass / width)
    double density(int i) const;
};

Histogram bin_ensemble(const Ensemble& ensemble, int n_bins);

// L1 distance between normalized bin masses, in [0, 2]. Requires identical
// binning; underflow/overflow masses are compared as two extra cells.
double l1_distance(const Histogram& h, const Histogram& ref);

// Same, against a continuous density integrated per bin by quadrature.
double l1_distance(const Histogram& h, const QEDensity& ref);

// Batch-means standard error of the mean of a series. Uses the last
// n_batches * floor(len/n_batches) entries.
double batch_se(const std::vector<double>& series, int n_batches);

} // namespace fene
