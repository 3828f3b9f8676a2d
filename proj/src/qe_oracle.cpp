// SPDX-License-Identifier: Apache-2.0
#include "fene/qe_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fene/errors.hpp"
#include "fene/quadrature.hpp"

namespace fene {
namespace {

constexpr int kPanels = 256;
constexpr int kPointsPerPanel = 24;
constexpr int kDualMaxIters = 200;
constexpr double kDualTol = 1e-11;   // scaled moment residual
constexpr double kWallEta = 1e-8;    // coordinate truncation for divergent terms

struct DualStats {
    double log_z = 0.0;
    std::vector<double> moments;      // scaled E[m_l]
    std::vector<double> cov;          // scaled covariance, row-major L x L
    double dual = 0.0;                // log_z - lambda . target
    bool defined = false;
};

// Fixed composite Gauss-Legendre grid with pre-evaluated scaled observables.
class QeGrid {
  public:
    QeGrid(const StrategySpec& spec, const std::vector<double>& scale, double x_max)
        : L_(spec.num_observables()) {
        std::vector<double> nodes(kPointsPerPanel), weights(kPointsPerPanel);
        gauss_legendre_rule(kPointsPerPanel, nodes.data(), weights.data());
        const int K = kPanels * kPointsPerPanel;
        xs_.resize(K);
        ws_.resize(K);
        const double width = 2.0 * x_max / kPanels;
        for (int p = 0; p < kPanels; ++p) {
            const double a = -x_max + p * width;
            const double c = a + 0.5 * width;
            for (int q = 0; q < kPointsPerPanel; ++q) {
                xs_[p * kPointsPerPanel + q] = c + 0.5 * width * nodes[q];
                ws_[p * kPointsPerPanel + q] = 0.5 * width * weights[q];
            }
        }
        const double b = spec.params().b;
        log_phi_.resize(K);
        m_.resize(static_cast<std::size_t>(L_) * K);
        for (int i = 0; i < K; ++i) {
            const double x = xs_[i];
            log_phi_[i] = 0.5 * b * std::log(1.0 - x * x / b);
            double vals[16];
            spec.eval_all(x, vals);
            for (int l = 0; l < L_; ++l) {
                m_[static_cast<std::size_t>(l) * K + i] = vals[l] / scale[l];
            }
        }
        // ln of the phi_eq normalization over the same domain
        double zmax = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < K; ++i) zmax = std::max(zmax, log_phi_[i]);
        double z = 0.0;
        for (int i = 0; i < K; ++i) z += ws_[i] * std::exp(log_phi_[i] - zmax);
        log_z_eq_ = std::log(z) + zmax;
    }

    DualStats stats(const std::vector<double>& lambda, const std::vector<double>& target) const {
        const int K = static_cast<int>(xs_.size());
        DualStats s;
        // shift by the max exponent to keep exp() in range
        double emax = -std::numeric_limits<double>::infinity();
        std::vector<double> ex(K);
        for (int i = 0; i < K; ++i) {
            double e = log_phi_[i];
            for (int l = 0; l < L_; ++l) e += lambda[l] * m_[static_cast<std::size_t>(l) * K + i];
            ex[i] = e;
            emax = std::max(emax, e);
        }
        if (!std::isfinite(emax)) return s;
        double z = 0.0;
        std::vector<double> em(L_, 0.0);
        std::vector<double> mm(static_cast<std::size_t>(L_) * L_, 0.0);
        for (int i = 0; i < K; ++i) {
            const double w = ws_[i] * std::exp(ex[i] - emax);
            z += w;
            for (int l = 0; l < L_; ++l) {
                const double ml = m_[static_cast<std::size_t>(l) * K + i];
                em[l] += w * ml;
                for (int j = l; j < L_; ++j) {
                    mm[static_cast<std::size_t>(l) * L_ + j] +=
                        w * ml * m_[static_cast<std::size_t>(j) * K + i];
                }
            }
        }
        if (!(z > 0.0) || !std::isfinite(z)) return s;
        s.log_z = std::log(z) + emax;
        s.moments.resize(L_);
        s.cov.assign(static_cast<std::size_t>(L_) * L_, 0.0);
        for (int l = 0; l < L_; ++l) s.moments[l] = em[l] / z;
        for (int l = 0; l < L_; ++l) {
            for (int j = l; j < L_; ++j) {
                const double c = mm[static_cast<std::size_t>(l) * L_ + j] / z -
                                 s.moments[l] * s.moments[j];
                s.cov[static_cast<std::size_t>(l) * L_ + j] = c;
                s.cov[static_cast<std::size_t>(j) * L_ + l] = c;
            }
        }
        s.dual = s.log_z;
        for (int l = 0; l < L_; ++l) s.dual -= lambda[l] * target[l];
        s.defined = std::isfinite(s.dual);
        return s;
    }

    double log_z_eq() const { return log_z_eq_; }

  private:
    int L_;
    std::vector<double> xs_, ws_, log_phi_, m_;
    double log_z_eq_ = 0.0;
};

// Cholesky LDL^T-free factorization; returns false when not positive
// definite. `min_pivot` reports the smallest diagonal pivot encountered.
bool cholesky_solve(std::vector<double> a, std::vector<double> rhs, int L,
                    std::vector<double>& out, double& min_pivot) {
    min_pivot = std::numeric_limits<double>::infinity();
    for (int c = 0; c < L; ++c) {
        double d = a[c * L + c];
        for (int k = 0; k < c; ++k) d -= a[c * L + k] * a[c * L + k];
        if (!(d > 0.0)) return false;
        min_pivot = std::min(min_pivot, d);
        const double s = std::sqrt(d);
        a[c * L + c] = s;
        for (int r = c + 1; r < L; ++r) {
            double v = a[r * L + c];
            for (int k = 0; k < c; ++k) v -= a[r * L + k] * a[c * L + k];
            a[r * L + c] = v / s;
        }
    }
    // forward then backward substitution
    for (int r = 0; r < L; ++r) {
        double v = rhs[r];
        for (int k = 0; k < r; ++k) v -= a[r * L + k] * rhs[k];
        rhs[r] = v / a[r * L + r];
    }
    out.assign(L, 0.0);
    for (int r = L - 1; r >= 0; --r) {
        double v = rhs[r];
        for (int k = r + 1; k < L; ++k) v -= a[k * L + r] * out[k];
        out[r] = v / a[r * L + r];
    }
    return true;
}

struct DualSolveResult {
    std::vector<double> lambda_scaled;
    DualStats stats;
    double min_pivot = 0.0;
    int iters = 0;
    double residual = 0.0; // max scaled |E[m] - M|
    bool stationary = false;
};

// Box-constrained Newton descent of the dual (lambda <= 0 on divergent
// coordinates), with an active-set reduction and backtracking line search.
DualSolveResult solve_dual(const QeGrid& grid, const StrategySpec& spec,
                           const std::vector<double>& target) {
    const int L = spec.num_observables();
    std::vector<bool> divergent(L);
    for (int l = 0; l < L; ++l) divergent[l] = spec.terms()[l].divergent();

    DualSolveResult out;
    std::vector<double> lambda(L, 0.0);
    DualStats cur = grid.stats(lambda, target);
    if (!cur.defined) {
        throw QuadratureFailureError("qe_solve: dual undefined at lambda = 0");
    }
    double min_pivot_seen = std::numeric_limits<double>::infinity();

    for (int it = 0; it < kDualMaxIters; ++it) {
        std::vector<double> g(L);
        for (int l = 0; l < L; ++l) g[l] = cur.moments[l] - target[l];

        // coordinates pinned at the boundary whose gradient pushes outward
        std::vector<int> free;
        for (int l = 0; l < L; ++l) {
            const bool pinned = divergent[l] && lambda[l] >= 0.0 && g[l] < 0.0;
            if (!pinned) free.push_back(l);
        }

        double gnorm = 0.0;
        for (int l : free) gnorm = std::max(gnorm, std::abs(g[l]));
        if (gnorm <= kDualTol) {
            out.lambda_scaled = lambda;
            out.stats = cur;
            out.min_pivot = min_pivot_seen;
            out.iters = it;
            double resid = 0.0;
            for (int l = 0; l < L; ++l) resid = std::max(resid, std::abs(g[l]));
            out.residual = resid;
            out.stationary = true;
            return out;
        }
        if (free.empty()) break;

        const int F = static_cast<int>(free.size());
        std::vector<double> h(static_cast<std::size_t>(F) * F), gf(F);
        for (int a = 0; a < F; ++a) {
            gf[a] = g[free[a]];
            for (int b2 = 0; b2 < F; ++b2) {
                h[a * F + b2] = cur.cov[static_cast<std::size_t>(free[a]) * L + free[b2]];
            }
        }
        std::vector<double> step_f;
        double piv = 0.0;
        if (!cholesky_solve(std::move(h), gf, F, step_f, piv)) {
            // covariance degenerate: constraints dependent or boundary target
            break;
        }
        min_pivot_seen = std::min(min_pivot_seen, piv);
        std::vector<double> step(L, 0.0);
        for (int a = 0; a < F; ++a) step[free[a]] = -step_f[a];

        // cap the step at the admissible boundary
        double alpha = 1.0;
        for (int l = 0; l < L; ++l) {
            if (divergent[l] && step[l] > 0.0 && lambda[l] + step[l] > 0.0) {
                alpha = std::min(alpha, (0.0 - lambda[l]) / step[l]);
            }
        }
        bool moved = false;
        double a_try = alpha > 0.0 ? alpha : 1.0;
        for (int h2 = 0; h2 < 60; ++h2) {
            std::vector<double> cand(L);
            for (int l = 0; l < L; ++l) {
                cand[l] = lambda[l] + a_try * step[l];
                if (divergent[l]) cand[l] = std::min(cand[l], 0.0);
            }
            const DualStats st = grid.stats(cand, target);
            if (st.defined && st.dual <= cur.dual + 1e-13 * std::max(1.0, std::abs(cur.dual))) {
                bool same = true;
                for (int l = 0; l < L; ++l) same = same && cand[l] == lambda[l];
                if (same) break;
                lambda = std::move(cand);
                cur = st;
                moved = true;
                break;
            }
            a_try *= 0.5;
        }
        if (!moved) break; // stationary within the box
    }

    out.lambda_scaled = lambda;
    out.stats = cur;
    out.min_pivot = min_pivot_seen;
    out.iters = kDualMaxIters;
    double resid = 0.0;
    for (int l = 0; l < L; ++l) resid = std::max(resid, std::abs(cur.moments[l] - target[l]));
    out.residual = resid;
    out.stationary = false;
    return out;
}

double wall_limit(const StrategySpec& spec) {
    const double r = std::sqrt(spec.params().b);
    return spec.has_divergent_terms() ? r * (1.0 - kWallEta) : r;
}

std::vector<double> target_scales(const std::vector<double>& values) {
    std::vector<double> s(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s[i] = std::max(1.0, std::abs(values[i]));
    return s;
}

} // namespace

QEDensity::QEDensity(std::vector<double> multipliers, const StrategySpec& spec)
    : multipliers_(std::move(multipliers)), spec_(spec), x_max_(wall_limit(spec)) {
    if (static_cast<int>(multipliers_.size()) != spec_.num_observables()) {
        throw DimensionMismatchError("QEDensity: multiplier count does not match the spec");
    }
    for (int l = 0; l < spec_.num_observables(); ++l) {
        if (spec_.terms()[l].divergent() && multipliers_[l] > 0.0) {
            throw InfeasibleMomentsError(
                "QEDensity: positive multiplier on a divergent observable is not integrable");
        }
    }
    finalize();
}

void QEDensity::finalize() {
    const int L = spec_.num_observables();
    std::vector<double> scale(L, 1.0);
    QeGrid grid(spec_, scale, x_max_);
    const std::vector<double> zero_target(L, 0.0);
    const DualStats st = grid.stats(multipliers_, zero_target);
    if (!st.defined) throw QuadratureFailureError("QEDensity: normalization failed");
    log_norm_ = st.log_z;
    log_z_eq_ = grid.log_z_eq();
    moments_ = st.moments;
}

double QEDensity::pdf(double x) const {
    if (x <= -x_max_ || x >= x_max_) return 0.0;
    const double b = spec_.params().b;
    double e = 0.5 * b * std::log(1.0 - x * x / b) - log_norm_;
    double vals[16];
    spec_.eval_all(x, vals);
    for (std::size_t l = 0; l < multipliers_.size(); ++l) e += multipliers_[l] * vals[l];
    return std::exp(e);
}

double QEDensity::moment(const std::function<double(double)>& g) const {
    return adaptive_gauss_legendre([this, &g](double x) { return g(x) * pdf(x); }, -x_max_,
                                   x_max_, 1e-9, 1e-13);
}

double QEDensity::relative_entropy() const {
    double h = log_z_eq_ - log_norm_;
    for (std::size_t l = 0; l < multipliers_.size(); ++l) h += multipliers_[l] * moments_[l];
    return h;
}

namespace {
void check_params_match(const StrategySpec& spec, const ModelParams& params, const char* who) {
    if (params.b != spec.params().b || params.we != spec.params().we) {
        throw InvalidArgumentError(std::string(who) + ": params disagree with the strategy spec");
    }
}
} // namespace

QEDensity qe_solve(const MacroState& target, const StrategySpec& spec,
                   const ModelParams& params) {
    check_params_match(spec, params, "qe_solve");
    const int L = spec.num_observables();
    if (static_cast<int>(target.values.size()) != L) {
        throw DimensionMismatchError("qe_solve: target size does not match the spec");
    }
    const auto scale = target_scales(target.values);
    std::vector<double> scaled_target(L);
    for (int l = 0; l < L; ++l) scaled_target[l] = target.values[l] / scale[l];
    QeGrid grid(spec, scale, wall_limit(spec));
    const DualSolveResult sol = solve_dual(grid, spec, scaled_target);
    if (sol.residual > 1e-8) {
        throw InfeasibleMomentsError(
            "qe_solve: target demands positive multipliers on divergent observables or lies "
            "outside the realizable moment set (scaled residual " +
            std::to_string(sol.residual) + ")");
    }
    std::vector<double> lambda(L);
    for (int l = 0; l < L; ++l) lambda[l] = sol.lambda_scaled[l] / scale[l];
    QEDensity density(std::move(lambda), spec);
    density.min_pivot_ = sol.min_pivot;
    density.newton_iters_ = sol.iters;
    return density;
}

QEDensity qe_nearest_feasible(const MacroState& target, const StrategySpec& spec,
                              const ModelParams& params) {
    check_params_match(spec, params, "qe_nearest_feasible");
    const int L = spec.num_observables();
    if (static_cast<int>(target.values.size()) != L) {
        throw DimensionMismatchError("qe_nearest_feasible: target size does not match the spec");
    }
    const auto scale = target_scales(target.values);
    std::vector<double> scaled_target(L);
    for (int l = 0; l < L; ++l) scaled_target[l] = target.values[l] / scale[l];
    QeGrid grid(spec, scale, wall_limit(spec));
    const DualSolveResult sol = solve_dual(grid, spec, scaled_target);
    std::vector<double> lambda(L);
    for (int l = 0; l < L; ++l) lambda[l] = sol.lambda_scaled[l] / scale[l];
    QEDensity density(std::move(lambda), spec);
    density.min_pivot_ = sol.min_pivot;
    density.newton_iters_ = sol.iters;
    return density;
}

double relative_entropy(const Histogram& h, double b) {
    if (h.underflow > 0 || h.overflow > 0) {
        throw SupportViolationError(
            "relative_entropy: histogram mass outside the support of phi_eq");
    }
    const EquilibriumDensity eq(b);
    double hsum = 0.0;
    for (int i = 0; i < h.n_bins(); ++i) {
        const double p = h.mass(i);
        if (p == 0.0) continue;
        const double q = adaptive_gauss_legendre([&eq](double x) { return eq(x); }, h.edges[i],
                                                 h.edges[i + 1], 1e-9, 1e-300);
        if (q <= 0.0) {
            throw SupportViolationError("relative_entropy: histogram mass where phi_eq = 0");
        }
        hsum += p * std::log(p / q);
    }
    return hsum;
}

} // namespace fene
