// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fene/config.hpp"

namespace fene {

// Runs the configured experiment, writing trajectory/histogram/density CSVs
// plus manifest.json into out_dir (created if missing). Deterministic given
// the seed. On failure an error.json record is left in out_dir and the
// triggering error is rethrown. Returns the manifest path.
std::string run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

} // namespace fene
