// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace fene {

// Pre-imposed scalar velocity-gradient schedule kappa(t). Immutable.
class FlowSchedule {
  public:
    enum class Kind { zero, constant, complex, tabulated };

    static FlowSchedule zero();
    static FlowSchedule constant(double rate);
    // kappa(t) = 100 t (1 - t) exp(-4 t)
    static FlowSchedule complex();
    // linear interpolation, clamped at the endpoints; times strictly increasing
    static FlowSchedule tabulated(std::vector<double> times, std::vector<double> values);
    // two-column CSV (t, kappa); a non-numeric first line is treated as a header
    static FlowSchedule from_csv(const std::string& path);

    double kappa(double t) const;
    Kind kind() const { return kind_; }
    double rate() const { return rate_; }

  private:
    FlowSchedule(Kind kind, double rate) : kind_(kind), rate_(rate) {}
    Kind kind_;
    double rate_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

} // namespace fene
