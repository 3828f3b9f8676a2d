// SPDX-License-Identifier: Apache-2.0
#include "fene/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fene/errors.hpp"

namespace fene {

FlowSchedule FlowSchedule::zero() { return FlowSchedule(Kind::zero, 0.0); }

FlowSchedule FlowSchedule::constant(double rate) { return FlowSchedule(Kind::constant, rate); }

FlowSchedule FlowSchedule::complex() { return FlowSchedule(Kind::complex, 0.0); }

FlowSchedule FlowSchedule::tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size()) {
        throw InvalidArgumentError("tabulated schedule needs equal, nonempty time/value arrays");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidArgumentError("tabulated schedule times must be strictly increasing");
        }
    }
    FlowSchedule s(Kind::tabulated, 0.0);
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

FlowSchedule FlowSchedule::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open flow schedule file: " + path);
    std::vector<double> t, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (lineno == 1) continue; // header
            throw ParseError("flow schedule: bad line " + std::to_string(lineno) + " in " + path);
        }
        t.push_back(a);
        v.push_back(b);
    }
    return tabulated(std::move(t), std::move(v));
}

double FlowSchedule::kappa(double t) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return rate_;
        case Kind::complex:
            return 100.0 * t * (1.0 - t) * std::exp(-4.0 * t);
        case Kind::tabulated: {
            if (t <= times_.front()) return values_.front();
            if (t >= times_.back()) return values_.back();
            const auto it = std::upper_bound(times_.begin(), times_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - times_.begin());
            const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
            return values_[i - 1] + w * (values_[i] - values_[i - 1]);
        }
    }
    throw InternalError("FlowSchedule::kappa: unreachable");
}

} // namespace fene
