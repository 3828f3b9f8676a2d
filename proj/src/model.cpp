// SPDX-License-Identifier: Apache-2.0
#include "fene/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "fene/ensemble.hpp"
#include "fene/errors.hpp"
#include "fene/parallel.hpp"
#include "fene/quadrature.hpp"
#include "fene/rng.hpp"

namespace fene {

void ModelParams::validate() const {
    if (!(b > 0.0)) throw InvalidArgumentError("ModelParams: b must be > 0");
    if (!(we > 0.0)) throw InvalidArgumentError("ModelParams: we must be > 0");
    if (!(eps > 0.0) || !(eps <= 1.0)) {
        throw InvalidArgumentError("ModelParams: eps must satisfy 0 < eps <= 1");
    }
}

double ModelParams::max_extension() const { return std::sqrt(b); }

ForceEvaluation force_eval(double x, const ModelParams& params, std::optional<double> msq) {
    switch (params.force_model) {
        case ForceModel::hookean:
            return {x, 1.0};
        case ForceModel::fene: {
            const double denom = 1.0 - x * x / params.b;
            if (denom <= 0.0) {
                throw DomainError("FENE force undefined at x^2 >= b (x = " + std::to_string(x) +
                                  ", b = " + std::to_string(params.b) + ")");
            }
            return {x / denom, denom};
        }
        case ForceModel::fenep: {
            if (!msq) {
                throw MissingMomentError("FENE-P force requires the ensemble mean square <X^2>");
            }
            const double denom = 1.0 - *msq / params.b;
            if (denom <= 0.0) {
                throw DomainError("FENE-P force undefined: <X^2> = " + std::to_string(*msq) +
                                  " >= b = " + std::to_string(params.b));
            }
            return {x / denom, denom};
        }
    }
    throw InternalError("force_eval: unreachable");
}

double force(double x, const ModelParams& params, std::optional<double> msq) {
    return force_eval(x, params, msq).value;
}

EquilibriumDensity::EquilibriumDensity(double b) : b_(b) {
    if (!(b > 0.0)) throw InvalidArgumentError("EquilibriumDensity: b must be > 0");
    const double half_b = 0.5 * b;
    const double r = std::sqrt(b);
    z_ = adaptive_gauss_legendre(
        [b, half_b](double x) { return std::pow(1.0 - x * x / b, half_b); }, -r, r, 1e-10);
}

double EquilibriumDensity::operator()(double x) const {
    const double u = 1.0 - x * x / b_;
    if (u <= 0.0) return 0.0;
    return std::pow(u, 0.5 * b_) / z_;
}

double EquilibriumDensity::moment(int power) const {
    const double r = std::sqrt(b_);
    return adaptive_gauss_legendre(
        [this, power](double x) { return std::pow(x, power) * (*this)(x); }, -r, r, 1e-10);
}

double equilibrium_density(double x, double b) {
    static std::mutex mutex;
    static std::map<double, EquilibriumDensity> cache;
    const EquilibriumDensity* density = nullptr;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(b);
        if (it == cache.end()) it = cache.emplace(b, EquilibriumDensity(b)).first;
        density = &it->second;
    }
    return (*density)(x);
}

Ensemble sample_equilibrium(std::size_t n, const ModelParams& params, std::uint64_t seed,
                            std::uint32_t stream) {
    if (n < 1) throw InvalidArgumentError("sample_equilibrium: n must be >= 1");
    params.validate();
    Ensemble ens;
    ens.params = params;
    ens.time = 0.0;
    ens.configs.resize(n);
    const double alpha = 0.5 * params.b + 1.0;
    const double root_b = std::sqrt(params.b);
    double* out = ens.configs.data();
    parallel_for_chunks(n, 4096, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            std::uint32_t draw = 0;
            const auto p = static_cast<std::uint32_t>(i);
            const double g1 = rng::gamma(seed, rng::Phase::init, stream, p, draw, alpha);
            const double g2 = rng::gamma(seed, rng::Phase::init, stream, p, draw, alpha);
            const double beta = g1 / (g1 + g2);
            out[i] = root_b * (2.0 * beta - 1.0);
        }
    });
    return ens;
}

double Ensemble::mean_square() const {
    if (configs.empty()) throw InvalidArgumentError("mean_square of empty ensemble");
    const double* x = configs.data();
    const auto sum = block_sum(configs.size(), 1, [x](std::size_t i, double* acc) {
        acc[0] += x[i] * x[i];
    });
    return sum[0] / static_cast<double>(configs.size());
}

} // namespace fene
