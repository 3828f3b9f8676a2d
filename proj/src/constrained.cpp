// SPDX-License-Identifier: Apache-2.0
#include "fene/constrained.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "fene/errors.hpp"
#include "fene/histio.hpp"
#include "fene/parallel.hpp"

namespace fene {
namespace {

constexpr int kNewtonMaxIters = 50;
constexpr int kNewtonMaxHalvings = 10;
constexpr int kCombinedRetryRounds = 100;

// Solve A x = -g in place (A is L x L row-major, overwritten). Partial
// pivoting; throws on a numerically singular pivot.
std::vector<double> solve_newton_system(std::vector<double> a, std::vector<double> g) {
    const int L = static_cast<int>(g.size());
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) throw SingularJacobianError("projection Jacobian is identically zero");
    std::vector<int> perm(L);
    for (int i = 0; i < L; ++i) perm[i] = i;
    for (int col = 0; col < L; ++col) {
        int piv = col;
        for (int r = col + 1; r < L; ++r) {
            if (std::abs(a[r * L + col]) > std::abs(a[piv * L + col])) piv = r;
        }
        if (std::abs(a[piv * L + col]) <= 1e-14 * amax) {
            throw SingularJacobianError(
                "projection Jacobian is numerically singular; constraints are dependent");
        }
        if (piv != col) {
            for (int c = 0; c < L; ++c) std::swap(a[col * L + c], a[piv * L + c]);
            std::swap(g[col], g[piv]);
        }
        const double d = a[col * L + col];
        for (int r = col + 1; r < L; ++r) {
            const double f = a[r * L + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < L; ++c) a[r * L + c] -= f * a[col * L + c];
            g[r] -= f * g[col];
        }
    }
    std::vector<double> x(L);
    for (int r = L - 1; r >= 0; --r) {
        double s = -g[r];
        for (int c = r + 1; c < L; ++c) s -= a[r * L + c] * x[c];
        x[r] = s / a[r * L + r];
    }
    return x;
}

struct ResidualEval {
    std::vector<double> residual; // R(X(lambda)) - M, scaled copy kept separately
    double scaled_norm = std::numeric_limits<double>::infinity();
    bool defined = false;
};

class Projector {
  public:
    Projector(const Ensemble& trial, const MacroState& target, const StrategySpec& spec,
              const double* gradients)
        : trial_(trial.configs.data()),
          n_(trial.size()),
          target_(target.values),
          spec_(spec),
          grad_(gradients),
          L_(spec.num_observables()) {
        scale_.resize(L_);
        for (int l = 0; l < L_; ++l) scale_[l] = std::max(1.0, std::abs(target_[l]));
    }

    void apply(const std::vector<double>& lambda, double* out) const {
        parallel_for_chunks(n_, 4096, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) {
                double x = trial_[i];
                for (int l = 0; l < L_; ++l) x += lambda[l] * grad_[l * n_ + i];
                out[i] = x;
            }
        });
    }

    ResidualEval residual(const std::vector<double>& lambda) const {
        std::atomic<bool> bad{false};
        auto sums = block_sum(n_, static_cast<std::size_t>(L_), [&](std::size_t i, double* acc) {
            double x = trial_[i];
            for (int l = 0; l < L_; ++l) x += lambda[l] * grad_[l * n_ + i];
            double vals[16];
            if (!spec_.eval_all(x, vals)) {
                bad.store(true, std::memory_order_relaxed);
                return;
            }
            for (int l = 0; l < L_; ++l) acc[l] += vals[l];
        });
        ResidualEval ev;
        if (bad.load()) return ev;
        ev.defined = true;
        ev.residual.resize(L_);
        ev.scaled_norm = 0.0;
        for (int l = 0; l < L_; ++l) {
            ev.residual[l] = sums[l] / static_cast<double>(n_) - target_[l];
            ev.scaled_norm = std::max(ev.scaled_norm, std::abs(ev.residual[l]) / scale_[l]);
        }
        if (!std::isfinite(ev.scaled_norm)) {
            ev.defined = false;
            ev.scaled_norm = std::numeric_limits<double>::infinity();
        }
        return ev;
    }

    // Jacobian J_{lj} = (1/N) sum_n m_l'(X_n(lambda)) grad_j[n]
    std::vector<double> jacobian(const std::vector<double>& lambda) const {
        const std::size_t k = static_cast<std::size_t>(L_) * L_;
        std::atomic<bool> bad{false};
        auto sums = block_sum(n_, k, [&](std::size_t i, double* acc) {
            double x = trial_[i];
            for (int l = 0; l < L_; ++l) x += lambda[l] * grad_[l * n_ + i];
            double ders[16];
            if (!spec_.deriv_all(x, ders)) {
                bad.store(true, std::memory_order_relaxed);
                return;
            }
            for (int l = 0; l < L_; ++l) {
                for (int j = 0; j < L_; ++j) {
                    acc[l * L_ + j] += ders[l] * grad_[j * n_ + i];
                }
            }
        });
        if (bad.load()) {
            throw InternalError("projection Jacobian evaluated outside the observable domain");
        }
        for (auto& v : sums) v /= static_cast<double>(n_);
        return sums;
    }

    int num_constraints() const { return L_; }

  private:
    const double* trial_;
    std::size_t n_;
    const std::vector<double>& target_;
    const StrategySpec& spec_;
    const double* grad_;
    int L_;
    std::vector<double> scale_;
};

ProjectionResult project_with_gradients(const Ensemble& trial, const MacroState& target,
                                        const StrategySpec& spec, const double* gradients) {
    const int L = spec.num_observables();
    if (static_cast<int>(target.values.size()) != L) {
        throw DimensionMismatchError("project: target has " +
                                     std::to_string(target.values.size()) + " values, spec has " +
                                     std::to_string(L));
    }
    Projector proj(trial, target, spec, gradients);
    std::vector<double> lambda(L, 0.0);
    ResidualEval cur = proj.residual(lambda);
    if (!cur.defined) {
        throw DomainError("project: trial ensemble lies outside the observable domain");
    }

    int iters = 0;
    while (cur.scaled_norm > kProjectionTol) {
        if (iters >= kNewtonMaxIters) {
            throw NewtonDivergenceError("projection Newton did not converge in " +
                                        std::to_string(kNewtonMaxIters) + " iterations (residual " +
                                        std::to_string(cur.scaled_norm) + ")");
        }
        const auto jac = proj.jacobian(lambda);
        const auto step = solve_newton_system(jac, cur.residual);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= kNewtonMaxHalvings; ++h) {
            std::vector<double> cand(L);
            for (int l = 0; l < L; ++l) cand[l] = lambda[l] + alpha * step[l];
            const ResidualEval ev = proj.residual(cand);
            // accept any decrease; undefined evaluations count as worse
            if (ev.defined && ev.scaled_norm < cur.scaled_norm) {
                lambda = std::move(cand);
                cur = ev;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        ++iters;
        if (!accepted) {
            throw NewtonDivergenceError(
                "projection Newton stalled after damping (residual " +
                std::to_string(cur.scaled_norm) + ")");
        }
    }

    ProjectionResult result;
    result.multipliers = lambda;
    result.newton_iters = iters;
    result.residual = cur.scaled_norm;
    result.ensemble = trial;
    bool zero = true;
    for (double l : lambda) zero = zero && l == 0.0;
    if (!zero) proj.apply(lambda, result.ensemble.configs.data());
    return result;
}

// first unconstrained even moment (monitor when the stress is constrained)
double first_free_even_moment(const Ensemble& ens, const StrategySpec& spec) {
    int max_power = 0;
    for (const auto& t : spec.terms()) {
        if (t.kind == ObservableTerm::Kind::even_power) max_power = std::max(max_power, t.power);
    }
    const int p = max_power + 1;
    const double* x = ens.configs.data();
    auto sum = block_sum(ens.size(), 1, [&](std::size_t i, double* acc) {
        double v = 1.0;
        const double x2 = x[i] * x[i];
        for (int q = 0; q < p; ++q) v *= x2;
        acc[0] += v;
    });
    return sum[0] / static_cast<double>(ens.size());
}

} // namespace

ProjectionResult project(const Ensemble& prev, const Ensemble& trial, const MacroState& target,
                         const StrategySpec& spec) {
    if (prev.size() != trial.size()) {
        throw DimensionMismatchError("project: prev and trial ensembles differ in size");
    }
    const auto gradients = gradient_matrix(prev, spec);
    return project_with_gradients(trial, target, spec, gradients.data());
}

Ensemble constrained_step(const Ensemble& ens, const MacroState& target,
                          const StrategySpec& spec, double kappa_frozen, double dt,
                          const NoiseKey& key) {
    if (!(dt > 0.0)) throw InvalidArgumentError("constrained_step: dt must be > 0");
    const std::size_t n = ens.size();
    if (n == 0) throw InvalidArgumentError("constrained_step: empty ensemble");
    const ModelParams& p = spec.params();
    const bool fene_bound = p.force_model == ForceModel::fene;
    const double bound = fene_bound ? fene_step_bound(dt, p) : 0.0;
    const double sigma = std::sqrt(dt / p.we);
    const double inv_2we = 1.0 / (2.0 * p.we);
    const bool domain_limited = spec.has_divergent_terms();
    const double domain_sq = p.b * (1.0 - 1e-12);

    std::optional<double> msq;
    if (p.force_model == ForceModel::fenep) msq = ens.mean_square();

    // drift is fixed across retries; only the Brownian increment is redrawn
    const double* x = ens.configs.data();
    std::vector<double> drift(n);
    parallel_for_chunks(n, 4096, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double f = force(x[i], p, msq);
            drift[i] = (kappa_frozen * x[i] - f * inv_2we) * dt;
        }
    });

    const auto gradients = gradient_matrix(ens, spec);

    Ensemble trial = ens;
    std::vector<std::uint32_t> draw(n, 0);
    std::vector<std::uint32_t> redraw(n);
    for (std::size_t i = 0; i < n; ++i) redraw[i] = static_cast<std::uint32_t>(i);

    std::atomic<bool> overflow{false};
    for (int round = 0; round < kCombinedRetryRounds; ++round) {
        // (re)generate trial moves for flagged particles
        parallel_for_chunks(redraw.size(), 2048, [&](std::size_t j0, std::size_t j1) {
            for (std::size_t j = j0; j < j1; ++j) {
                const std::uint32_t i = redraw[j];
                double t = x[i] + drift[i] +
                           sigma * rng::normal(key.seed, key.phase, key.step, i, draw[i]++);
                if (domain_limited) {
                    // divergent observables are undefined past sqrt(b); such a
                    // trial can never survive the combined move, so redraw now
                    while (t * t >= domain_sq) {
                        if (draw[i] > kRejectionRetryCap) {
                            overflow.store(true, std::memory_order_relaxed);
                            break;
                        }
                        t = x[i] + drift[i] +
                            sigma * rng::normal(key.seed, key.phase, key.step, i, draw[i]++);
                    }
                }
                trial.configs[i] = t;
            }
        });
        if (overflow.load()) break;

        ProjectionResult res = project_with_gradients(trial, target, spec, gradients.data());

        if (!fene_bound) return std::move(res.ensemble);
        redraw.clear();
        const double* y = res.ensemble.configs.data();
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] * y[i] > bound) redraw.push_back(static_cast<std::uint32_t>(i));
        }
        if (redraw.empty()) return std::move(res.ensemble);
        for (const auto i : redraw) {
            if (draw[i] > kRejectionRetryCap) {
                overflow.store(true, std::memory_order_relaxed);
                break;
            }
        }
        if (overflow.load()) break;
    }
    throw RejectionOverflowError(
        "constrained_step: combined move/projection rejection cap exceeded; dt too large");
}

LiftInit LiftInit::given(Ensemble e) {
    LiftInit init;
    init.kind = Kind::given;
    init.ens = std::move(e);
    init.n = init.ens.size();
    return init;
}

LiftInit LiftInit::equilibrium(std::size_t n) {
    LiftInit init;
    init.kind = Kind::equilibrium;
    init.n = n;
    return init;
}

LiftInit LiftInit::uniform(std::size_t n) {
    LiftInit init;
    init.kind = Kind::uniform;
    init.n = n;
    return init;
}

LiftReport lift(const MacroState& target, const StrategySpec& spec, const LiftOptions& options,
                const LiftInit& init, std::uint64_t seed) {
    if (options.m_inf < 0) throw InvalidArgumentError("lift: m_inf must be >= 0");
    const ModelParams& p = spec.params();

    Ensemble ens;
    switch (init.kind) {
        case LiftInit::Kind::given:
            ens = init.ens;
            break;
        case LiftInit::Kind::equilibrium:
            ens = sample_equilibrium(init.n, p, seed, /*stream=*/options.lift_step_base);
            break;
        case LiftInit::Kind::uniform: {
            if (init.n < 1) throw InvalidArgumentError("lift: uniform init needs n >= 1");
            ens.params = p;
            ens.configs.resize(init.n);
            const double half = std::sqrt(fene_step_bound(options.dt, p));
            parallel_for_chunks(init.n, 4096, [&](std::size_t i0, std::size_t i1) {
                for (std::size_t i = i0; i < i1; ++i) {
                    const double u = rng::uniform(seed, rng::Phase::init,
                                                  options.lift_step_base + 1,
                                                  static_cast<std::uint32_t>(i), 0);
                    ens.configs[i] = half * (2.0 * u - 1.0);
                }
            });
            break;
        }
    }
    ens.time = target.time;

    // initial projection of the init ensemble onto the constraint set
    // (gradients at the init state itself)
    {
        ProjectionResult res = project(ens, ens, target, spec);
        ens = std::move(res.ensemble);
    }

    const bool monitor_free_moment = spec.stress_constrained();
    const long window = options.plateau_window > 0
                            ? options.plateau_window
                            : std::max<long>(20, options.m_inf / 10);

    LiftReport report;
    report.monitor.reserve(options.m_inf);
    long steps = 0;
    for (long m = 0; m < options.m_inf; ++m) {
        const NoiseKey key{seed, rng::Phase::lift,
                           options.lift_step_base + static_cast<std::uint32_t>(m)};
        ens = constrained_step(ens, target, spec, options.kappa_frozen, options.dt, key);
        ++steps;
        report.monitor.push_back(monitor_free_moment ? first_free_even_moment(ens, spec)
                                                     : stress(ens, p));
        // plateau: two consecutive half-window means within one combined SE
        if (report.plateau_step < 0 && steps >= 2 * window && steps % window == 0) {
            const auto& mon = report.monitor;
            std::vector<double> a(mon.end() - 2 * window, mon.end() - window);
            std::vector<double> b_half(mon.end() - window, mon.end());
            const double se_a = batch_se(a, 5);
            const double se_b = batch_se(b_half, 5);
            double mean_a = 0.0, mean_b = 0.0;
            for (double v : a) mean_a += v;
            for (double v : b_half) mean_b += v;
            mean_a /= static_cast<double>(window);
            mean_b /= static_cast<double>(window);
            if (std::abs(mean_b - mean_a) < std::sqrt(se_a * se_a + se_b * se_b)) {
                report.plateau_step = steps;
                if (options.stop_at_plateau) break;
            }
        }
    }
    report.ensemble = std::move(ens);
    report.steps_run = steps;
    report.next_lift_step = options.lift_step_base + static_cast<std::uint32_t>(steps);
    return report;
}

LiftReport quasi_equilibrium_lift(const MacroState& target, const StrategySpec& spec,
                                  LiftOptions options, const LiftInit& init, std::uint64_t seed) {
    options.kappa_frozen = 0.0;
    return lift(target, spec, options, init, seed);
}

} // namespace fene
