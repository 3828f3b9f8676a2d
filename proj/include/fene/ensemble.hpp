// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "fene/model.hpp"

namespace fene {

// An ordered ensemble of scalar dumbbell configurations plus the simulation
// clock. Value-like: copy/move freely between threads.
struct Ensemble {
    std::vector<double> configs;
    double time = 0.0;
    ModelParams params;

    std::size_t size() const { return configs.size(); }

    // deterministic pairwise mean of x^2 (the FENE-P closure input)
    double mean_square() const;
};

} // namespace fene
