// SPDX-License-Identifier: Apache-2.0
#include "fene/observables.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "fene/errors.hpp"
#include "fene/parallel.hpp"

namespace fene {
namespace {

using Kind = ObservableTerm::Kind;

double pow_int(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

double term_eval(const ObservableTerm& t, double x, double u, double /*b*/) {
    const double x2 = x * x;
    switch (t.kind) {
        case Kind::even_power:
            return pow_int(x2, t.power) + t.offset;
        case Kind::connector:
            return x2 / u + t.offset;
        case Kind::cascade_third:
            return x2 / (u * u) + t.offset;
        case Kind::cascade_fourth:
            return x2 * x2 / (u * u * u) + t.offset;
    }
    throw InternalError("term_eval: unreachable");
}

double term_deriv(const ObservableTerm& t, double x, double u, double b) {
    const double x2 = x * x;
    switch (t.kind) {
        case Kind::even_power:
            return 2.0 * t.power * pow_int(x2, t.power - 1) * x;
        case Kind::connector:
            return 2.0 * x / (u * u);
        case Kind::cascade_third:
            return 2.0 * x * (1.0 + x2 / b) / (u * u * u);
        case Kind::cascade_fourth:
            return 2.0 * x2 * x * (2.0 + x2 / b) / (u * u * u * u);
    }
    throw InternalError("term_deriv: unreachable");
}

double term_second_deriv(const ObservableTerm& t, double x, double u, double b) {
    const double x2 = x * x;
    switch (t.kind) {
        case Kind::even_power: {
            const int p = t.power;
            return 2.0 * p * (2.0 * p - 1.0) * pow_int(x2, p - 1);
        }
        case Kind::connector:
            return 2.0 * (1.0 + 3.0 * x2 / b) / (u * u * u);
        case Kind::cascade_third:
            return (2.0 + 16.0 * x2 / b + 6.0 * x2 * x2 / (b * b)) / (u * u * u * u);
        case Kind::cascade_fourth:
            return 6.0 * x2 * (2.0 + 5.0 * x2 / b + x2 * x2 / (b * b)) / (u * u * u * u * u);
    }
    throw InternalError("term_second_deriv: unreachable");
}

std::string term_label(const ObservableTerm& t) {
    char buf[64];
    switch (t.kind) {
        case Kind::even_power:
            std::snprintf(buf, sizeof buf, "x^%d", 2 * t.power);
            break;
        case Kind::connector:
            std::snprintf(buf, sizeof buf, "x^2/(1-x^2/b)");
            break;
        case Kind::cascade_third:
            std::snprintf(buf, sizeof buf, "x^2/(1-x^2/b)^2");
            break;
        case Kind::cascade_fourth:
            std::snprintf(buf, sizeof buf, "x^4/(1-x^2/b)^3");
            break;
    }
    std::string s = buf;
    if (t.offset != 0.0) {
        std::snprintf(buf, sizeof buf, " %+g", t.offset);
        s += buf;
    }
    return s;
}

} // namespace

StrategySpec::StrategySpec(Strategy s, std::vector<ObservableTerm> terms,
                           const ModelParams& params)
    : strategy_(s), terms_(std::move(terms)), params_(params) {
    params_.validate();
    if (terms_.empty()) throw InvalidArgumentError("StrategySpec: needs at least one observable");
    if (terms_.size() > 16) throw InvalidArgumentError("StrategySpec: at most 16 observables");
    for (const auto& t : terms_) {
        if (t.kind == Kind::even_power && t.power < 1) {
            throw InvalidArgumentError("StrategySpec: even-power exponent must be >= 1");
        }
    }
    divergent_ = false;
    for (const auto& t : terms_) divergent_ = divergent_ || t.divergent();
}

StrategySpec StrategySpec::even_moments(int num_moments, const ModelParams& params) {
    if (num_moments < 1) throw InvalidArgumentError("even_moments: L must be >= 1");
    std::vector<ObservableTerm> terms;
    for (int l = 1; l <= num_moments; ++l) terms.push_back({Kind::even_power, l, 0.0});
    return StrategySpec(Strategy::even_moments, std::move(terms), params);
}

StrategySpec StrategySpec::even_moments_plus_stress(int num_vars, const ModelParams& params) {
    if (num_vars < 2) throw InvalidArgumentError("even_moments_plus_stress: L must be >= 2");
    std::vector<ObservableTerm> terms;
    for (int l = 1; l <= num_vars - 1; ++l) terms.push_back({Kind::even_power, l, 0.0});
    terms.push_back({Kind::connector, 1, 0.0});
    return StrategySpec(Strategy::even_moments_plus_stress, std::move(terms), params);
}

StrategySpec StrategySpec::stress_cascade(const ModelParams& params) {
    std::vector<ObservableTerm> terms = {
        {Kind::even_power, 1, 0.0},
        {Kind::connector, 1, -1.0},
        {Kind::cascade_third, 1, 0.0},
        {Kind::cascade_fourth, 1, 0.0},
    };
    return StrategySpec(Strategy::stress_cascade, std::move(terms), params);
}

StrategySpec StrategySpec::custom(std::vector<ObservableTerm> terms, const ModelParams& params) {
    return StrategySpec(Strategy::custom, std::move(terms), params);
}

StrategySpec StrategySpec::from_token(const std::string& token, const ModelParams& params) {
    const auto parse_count = [&](const std::string& prefix) {
        const std::string rest = token.substr(prefix.size());
        if (rest.empty()) throw ParseError("strategy token '" + token + "' is missing :L");
        char* end = nullptr;
        const long value = std::strtol(rest.c_str(), &end, 10);
        if (end == nullptr || *end != '\0' || value < 1 || value > 16) {
            throw ParseError("strategy token '" + token + "' has an invalid count");
        }
        return static_cast<int>(value);
    };
    if (token.rfind("even:", 0) == 0) return even_moments(parse_count("even:"), params);
    if (token.rfind("even+stress:", 0) == 0) {
        return even_moments_plus_stress(parse_count("even+stress:"), params);
    }
    if (token == "cascade") return stress_cascade(params);
    throw ParseError("unknown strategy token '" + token +
                     "' (expected even:L, even+stress:L, or cascade)");
}

std::string StrategySpec::token() const {
    switch (strategy_) {
        case Strategy::even_moments:
            return "even:" + std::to_string(num_observables());
        case Strategy::even_moments_plus_stress:
            return "even+stress:" + std::to_string(num_observables());
        case Strategy::stress_cascade:
            return "cascade";
        case Strategy::custom:
            return "custom:" + std::to_string(num_observables());
    }
    throw InternalError("token: unreachable");
}

std::string StrategySpec::label(int l) const { return term_label(terms_.at(l)); }

bool StrategySpec::has_divergent_terms() const { return divergent_; }

bool StrategySpec::stress_constrained() const {
    for (const auto& t : terms_) {
        if (t.kind == Kind::connector) return true;
    }
    return false;
}

bool StrategySpec::eval_all(double x, double* out) const {
    const double b = params_.b;
    const double u = 1.0 - x * x / b;
    if (u <= 0.0 && divergent_) return false;
    for (std::size_t l = 0; l < terms_.size(); ++l) out[l] = term_eval(terms_[l], x, u, b);
    return true;
}

bool StrategySpec::deriv_all(double x, double* out) const {
    const double b = params_.b;
    const double u = 1.0 - x * x / b;
    if (u <= 0.0 && divergent_) return false;
    for (std::size_t l = 0; l < terms_.size(); ++l) out[l] = term_deriv(terms_[l], x, u, b);
    return true;
}

double StrategySpec::eval(int l, double x) const {
    const auto& t = terms_.at(l);
    const double u = 1.0 - x * x / params_.b;
    if (u <= 0.0 && t.divergent()) {
        throw DomainError("observable " + term_label(t) + " undefined at |x| >= sqrt(b)");
    }
    return term_eval(t, x, u, params_.b);
}

double StrategySpec::deriv(int l, double x) const {
    const auto& t = terms_.at(l);
    const double u = 1.0 - x * x / params_.b;
    if (u <= 0.0 && t.divergent()) {
        throw DomainError("observable " + term_label(t) + " undefined at |x| >= sqrt(b)");
    }
    return term_deriv(t, x, u, params_.b);
}

double StrategySpec::second_deriv(int l, double x) const {
    const auto& t = terms_.at(l);
    const double u = 1.0 - x * x / params_.b;
    if (u <= 0.0 && t.divergent()) {
        throw DomainError("observable " + term_label(t) + " undefined at |x| >= sqrt(b)");
    }
    return term_second_deriv(t, x, u, params_.b);
}

Observable StrategySpec::observable(int l) const {
    StrategySpec copy = *this;
    return Observable{
        [copy, l](double x) { return copy.eval(l, x); },
        [copy, l](double x) { return copy.deriv(l, x); },
        [copy, l](double x) { return copy.second_deriv(l, x); },
        label(l),
    };
}

MacroState restrict_ensemble(const Ensemble& ensemble, const StrategySpec& spec) {
    const std::size_t n = ensemble.size();
    if (n == 0) throw InvalidArgumentError("restrict: empty ensemble");
    const int L = spec.num_observables();
    const double* x = ensemble.configs.data();
    std::atomic<bool> bad{false};
    auto sums = block_sum(n, static_cast<std::size_t>(L), [&](std::size_t i, double* acc) {
        double vals[16];
        if (!spec.eval_all(x[i], vals)) {
            bad.store(true, std::memory_order_relaxed);
            return;
        }
        for (int l = 0; l < L; ++l) acc[l] += vals[l];
    });
    if (bad.load()) {
        throw DomainError("restrict: configuration outside |x| < sqrt(b) under FENE observables");
    }
    MacroState m{std::move(sums), spec, ensemble.time};
    for (auto& v : m.values) v /= static_cast<double>(n);
    return m;
}

double stress(const Ensemble& ensemble, const ModelParams& params) {
    const std::size_t n = ensemble.size();
    if (n == 0) throw InvalidArgumentError("stress: empty ensemble");
    const double* x = ensemble.configs.data();
    const double b = params.b;
    std::atomic<bool> bad{false};
    std::vector<double> sum;
    switch (params.force_model) {
        case ForceModel::hookean:
            sum = block_sum(n, 1, [&](std::size_t i, double* acc) { acc[0] += x[i] * x[i]; });
            break;
        case ForceModel::fene:
            sum = block_sum(n, 1, [&](std::size_t i, double* acc) {
                const double u = 1.0 - x[i] * x[i] / b;
                if (u <= 0.0) {
                    bad.store(true, std::memory_order_relaxed);
                    return;
                }
                acc[0] += x[i] * x[i] / u;
            });
            break;
        case ForceModel::fenep: {
            const double msq = ensemble.mean_square();
            const double denom = 1.0 - msq / b;
            if (denom <= 0.0) throw DomainError("stress: FENE-P <X^2> >= b");
            sum = block_sum(n, 1, [&](std::size_t i, double* acc) {
                acc[0] += x[i] * x[i] / denom;
            });
            break;
        }
    }
    if (bad.load()) throw DomainError("stress: FENE configuration outside |x| < sqrt(b)");
    const double mean_xf = sum[0] / static_cast<double>(n);
    return params.eps / params.we * (mean_xf - 1.0);
}

std::vector<double> gradient_matrix(const Ensemble& ensemble, const StrategySpec& spec) {
    const std::size_t n = ensemble.size();
    if (n == 0) throw InvalidArgumentError("gradient_matrix: empty ensemble");
    const int L = spec.num_observables();
    const double* x = ensemble.configs.data();
    std::vector<double> grad(static_cast<std::size_t>(L) * n);
    const double inv_n = 1.0 / static_cast<double>(n);
    std::atomic<bool> bad{false};
    parallel_for_chunks(n, 4096, [&](std::size_t i0, std::size_t i1) {
        double vals[16];
        for (std::size_t i = i0; i < i1; ++i) {
            if (!spec.deriv_all(x[i], vals)) {
                bad.store(true, std::memory_order_relaxed);
                return;
            }
            for (int l = 0; l < L; ++l) grad[static_cast<std::size_t>(l) * n + i] = vals[l] * inv_n;
        }
    });
    if (bad.load()) {
        throw DomainError("gradient_matrix: configuration outside |x| < sqrt(b)");
    }
    return grad;
}

std::vector<double> eos_rhs(const MacroState& m, const std::vector<double>& extra,
                            double kappa_val, const ModelParams& params) {
    if (m.spec.strategy() != Strategy::even_moments) {
        throw InvalidArgumentError("eos_rhs applies to the even-moment hierarchy (strategy 1)");
    }
    const std::size_t L = m.values.size();
    if (extra.size() != L) {
        throw DimensionMismatchError("eos_rhs: expected " + std::to_string(L) +
                                     " connector terms, got " + std::to_string(extra.size()));
    }
    std::vector<double> rhs(L);
    for (std::size_t i = 0; i < L; ++i) {
        const double l = static_cast<double>(i + 1);
        const double m_prev = i == 0 ? 1.0 : m.values[i - 1];
        rhs[i] = 2.0 * l * kappa_val * m.values[i] - extra[i] / (2.0 * params.we) +
                 l * (2.0 * l - 1.0) * m_prev / params.we;
    }
    return rhs;
}

std::vector<double> connector_moments(const Ensemble& ensemble, const StrategySpec& spec) {
    const std::size_t n = ensemble.size();
    if (n == 0) throw InvalidArgumentError("connector_moments: empty ensemble");
    const int L = spec.num_observables();
    const double* x = ensemble.configs.data();
    const ModelParams& p = spec.params();
    std::optional<double> msq;
    if (p.force_model == ForceModel::fenep) msq = ensemble.mean_square();
    std::atomic<bool> bad{false};
    auto sums = block_sum(n, static_cast<std::size_t>(L), [&](std::size_t i, double* acc) {
        double der[16];
        if (!spec.deriv_all(x[i], der)) {
            bad.store(true, std::memory_order_relaxed);
            return;
        }
        double f;
        if (p.force_model == ForceModel::hookean) {
            f = x[i];
        } else {
            const double denom = 1.0 - (msq ? *msq : x[i] * x[i]) / p.b;
            if (denom <= 0.0) {
                bad.store(true, std::memory_order_relaxed);
                return;
            }
            f = x[i] / denom;
        }
        for (int l = 0; l < L; ++l) acc[l] += f * der[l];
    });
    if (bad.load()) throw DomainError("connector_moments: configuration outside the force domain");
    for (auto& v : sums) v /= static_cast<double>(n);
    return sums;
}

} // namespace fene
