// SPDX-License-Identifier: Apache-2.0
#include "fene_closure.h"

#include <cstring>
#include <string>

#include "fene/coarse.hpp"
#include "fene/csvio.hpp"
#include "fene/config.hpp"
#include "fene/constrained.hpp"
#include "fene/ensemble.hpp"
#include "fene/errors.hpp"
#include "fene/experiment.hpp"
#include "fene/fenep_ode.hpp"
#include "fene/flow.hpp"
#include "fene/histio.hpp"
#include "fene/model.hpp"
#include "fene/observables.hpp"
#include "fene/parallel.hpp"
#include "fene/qe_oracle.hpp"
#include "fene/sde.hpp"
#include "fene/version.hpp"

using namespace fene;

// Opaque handle definitions wrap the C++ value types.
struct fc_params { ModelParams v; };
struct fc_schedule { FlowSchedule v; };
struct fc_strategy { StrategySpec v; };
struct fc_ensemble { Ensemble v; };
struct fc_lift_report { LiftReport v; };
struct fc_trajectory { MacroTrajectory v; };
struct fc_qe_density { QEDensity v; };
struct fc_histogram { Histogram v; };

namespace {

thread_local std::string g_last_error;

fc_status status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ok: return FC_OK;
        case ErrorCode::invalid_argument: return FC_ERR_INVALID_ARGUMENT;
        case ErrorCode::domain: return FC_ERR_DOMAIN;
        case ErrorCode::missing_moment: return FC_ERR_MISSING_MOMENT;
        case ErrorCode::dimension_mismatch: return FC_ERR_DIMENSION_MISMATCH;
        case ErrorCode::rejection_overflow: return FC_ERR_REJECTION_OVERFLOW;
        case ErrorCode::newton_divergence: return FC_ERR_NEWTON_DIVERGENCE;
        case ErrorCode::singular_jacobian: return FC_ERR_SINGULAR_JACOBIAN;
        case ErrorCode::infeasible_moments: return FC_ERR_INFEASIBLE_MOMENTS;
        case ErrorCode::quadrature_failure: return FC_ERR_QUADRATURE;
        case ErrorCode::support_violation: return FC_ERR_SUPPORT_VIOLATION;
        case ErrorCode::bin_mismatch: return FC_ERR_BIN_MISMATCH;
        case ErrorCode::too_few_batches: return FC_ERR_TOO_FEW_BATCHES;
        case ErrorCode::parse: return FC_ERR_PARSE;
        case ErrorCode::io: return FC_ERR_IO;
        case ErrorCode::internal: return FC_ERR_INTERNAL;
    }
    return FC_ERR_INTERNAL;
}

template <typename Fn>
fc_status guarded(Fn&& fn) {
    try {
        fn();
        return FC_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FC_ERR_INTERNAL;
    }
}

fc_status null_arg(const char* what) {
    g_last_error = std::string("null pointer: ") + what;
    return FC_ERR_NULL_POINTER;
}

fc_status copy_out(const std::vector<double>& src, double* out, size_t capacity,
                   const char* what) {
    if (out == nullptr) return null_arg(what);
    if (capacity < src.size()) {
        g_last_error = std::string(what) + ": capacity too small";
        return FC_ERR_DIMENSION_MISMATCH;
    }
    std::memcpy(out, src.data(), src.size() * sizeof(double));
    return FC_OK;
}

} // namespace

extern "C" {

const char* fc_version(void) { return kVersion; }

const char* fc_last_error(void) { return g_last_error.c_str(); }

fc_status fc_set_threads(int n) {
    return guarded([&] {
        if (n < 1) throw InvalidArgumentError("fc_set_threads: n must be >= 1");
        set_num_threads(n);
    });
}

int fc_threads(void) { return num_threads(); }

/* --- params -------------------------------------------------------------- */

fc_status fc_params_create(double b, double we, double eps, fc_force_model force,
                           fc_params** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        ModelParams p;
        p.b = b;
        p.we = we;
        p.eps = eps;
        p.force_model = force == FC_FORCE_HOOKEAN  ? ForceModel::hookean
                        : force == FC_FORCE_FENE   ? ForceModel::fene
                        : force == FC_FORCE_FENEP  ? ForceModel::fenep
                                                   : throw InvalidArgumentError("bad force model");
        p.validate();
        *out = new fc_params{p};
    });
}

void fc_params_free(fc_params* p) { delete p; }

fc_status fc_force(const fc_params* p, double x, const double* msq_or_null, double* out) {
    if (!p || !out) return null_arg("fc_force");
    return guarded([&] {
        std::optional<double> msq;
        if (msq_or_null) msq = *msq_or_null;
        *out = force(x, p->v, msq);
    });
}

fc_status fc_equilibrium_density(double x, double b, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = equilibrium_density(x, b); });
}

/* --- schedules ------------------------------------------------------------*/

fc_status fc_schedule_zero(fc_schedule** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new fc_schedule{FlowSchedule::zero()}; });
}

fc_status fc_schedule_constant(double rate, fc_schedule** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new fc_schedule{FlowSchedule::constant(rate)}; });
}

fc_status fc_schedule_complex(fc_schedule** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new fc_schedule{FlowSchedule::complex()}; });
}

fc_status fc_schedule_tabulated(const double* times, const double* values, size_t n,
                                fc_schedule** out) {
    if (!times || !values || !out) return null_arg("fc_schedule_tabulated");
    return guarded([&] {
        *out = new fc_schedule{FlowSchedule::tabulated(std::vector<double>(times, times + n),
                                                       std::vector<double>(values, values + n))};
    });
}

fc_status fc_schedule_from_csv(const char* path, fc_schedule** out) {
    if (!path || !out) return null_arg("fc_schedule_from_csv");
    return guarded([&] { *out = new fc_schedule{FlowSchedule::from_csv(path)}; });
}

fc_status fc_schedule_kappa(const fc_schedule* s, double t, double* out) {
    if (!s || !out) return null_arg("fc_schedule_kappa");
    return guarded([&] { *out = s->v.kappa(t); });
}

void fc_schedule_free(fc_schedule* s) { delete s; }

/* --- strategies -----------------------------------------------------------*/

fc_status fc_strategy_create(const char* token, const fc_params* p, fc_strategy** out) {
    if (!token || !p || !out) return null_arg("fc_strategy_create");
    return guarded([&] { *out = new fc_strategy{StrategySpec::from_token(token, p->v)}; });
}

fc_status fc_strategy_num_observables(const fc_strategy* s, int* out) {
    if (!s || !out) return null_arg("fc_strategy_num_observables");
    *out = s->v.num_observables();
    return FC_OK;
}

void fc_strategy_free(fc_strategy* s) { delete s; }

/* --- ensembles ------------------------------------------------------------*/

fc_status fc_ensemble_sample_equilibrium(size_t n, const fc_params* p, uint64_t seed,
                                         uint32_t stream, fc_ensemble** out) {
    if (!p || !out) return null_arg("fc_ensemble_sample_equilibrium");
    return guarded([&] { *out = new fc_ensemble{sample_equilibrium(n, p->v, seed, stream)}; });
}

fc_status fc_ensemble_from_data(const double* configs, size_t n, const fc_params* p, double time,
                                fc_ensemble** out) {
    if (!configs || !p || !out) return null_arg("fc_ensemble_from_data");
    return guarded([&] {
        Ensemble e;
        e.configs.assign(configs, configs + n);
        e.params = p->v;
        e.time = time;
        *out = new fc_ensemble{std::move(e)};
    });
}

fc_status fc_ensemble_size(const fc_ensemble* e, size_t* out) {
    if (!e || !out) return null_arg("fc_ensemble_size");
    *out = e->v.size();
    return FC_OK;
}

fc_status fc_ensemble_time(const fc_ensemble* e, double* out) {
    if (!e || !out) return null_arg("fc_ensemble_time");
    *out = e->v.time;
    return FC_OK;
}

fc_status fc_ensemble_copy_data(const fc_ensemble* e, double* out, size_t capacity) {
    if (!e) return null_arg("fc_ensemble_copy_data");
    return copy_out(e->v.configs, out, capacity, "fc_ensemble_copy_data");
}

void fc_ensemble_free(fc_ensemble* e) { delete e; }

fc_status fc_simulate(fc_ensemble* e, const fc_schedule* s, double dt, long k_steps,
                      uint64_t seed, uint32_t start_step) {
    if (!e || !s) return null_arg("fc_simulate");
    return guarded([&] { e->v = simulate(std::move(e->v), s->v, dt, k_steps, seed, start_step); });
}

fc_status fc_restrict(const fc_ensemble* e, const fc_strategy* s, double* values) {
    if (!e || !s || !values) return null_arg("fc_restrict");
    return guarded([&] {
        const MacroState m = restrict_ensemble(e->v, s->v);
        std::memcpy(values, m.values.data(), m.values.size() * sizeof(double));
    });
}

fc_status fc_stress(const fc_ensemble* e, const fc_params* p, double* out) {
    if (!e || !p || !out) return null_arg("fc_stress");
    return guarded([&] { *out = stress(e->v, p->v); });
}

/* --- lifting --------------------------------------------------------------*/

fc_status fc_lift(const double* target_values, double target_time, const fc_strategy* s,
                  double kappa_frozen, double dt, long m_inf, int stop_at_plateau,
                  long plateau_window, uint32_t lift_step_base, int init_kind,
                  const fc_ensemble* init, size_t n_particles, uint64_t seed,
                  fc_lift_report** out) {
    if (!target_values || !s || !out) return null_arg("fc_lift");
    return guarded([&] {
        MacroState target{std::vector<double>(target_values,
                                              target_values + s->v.num_observables()),
                          s->v, target_time};
        LiftOptions opts;
        opts.kappa_frozen = kappa_frozen;
        opts.dt = dt;
        opts.m_inf = m_inf;
        opts.stop_at_plateau = stop_at_plateau != 0;
        opts.plateau_window = plateau_window;
        opts.lift_step_base = lift_step_base;
        LiftInit li;
        switch (init_kind) {
            case 0:
                if (!init) throw InvalidArgumentError("fc_lift: init_kind 0 needs an ensemble");
                li = LiftInit::given(init->v);
                break;
            case 1:
                li = LiftInit::equilibrium(n_particles);
                break;
            case 2:
                li = LiftInit::uniform(n_particles);
                break;
            default:
                throw InvalidArgumentError("fc_lift: init_kind must be 0, 1 or 2");
        }
        *out = new fc_lift_report{lift(target, s->v, opts, li, seed)};
    });
}

fc_status fc_lift_report_ensemble(const fc_lift_report* r, fc_ensemble** out) {
    if (!r || !out) return null_arg("fc_lift_report_ensemble");
    return guarded([&] { *out = new fc_ensemble{r->v.ensemble}; });
}

fc_status fc_lift_report_steps(const fc_lift_report* r, long* steps_run, long* plateau_step) {
    if (!r) return null_arg("fc_lift_report_steps");
    if (steps_run) *steps_run = r->v.steps_run;
    if (plateau_step) *plateau_step = r->v.plateau_step;
    return FC_OK;
}

fc_status fc_lift_report_monitor_len(const fc_lift_report* r, size_t* out) {
    if (!r || !out) return null_arg("fc_lift_report_monitor_len");
    *out = r->v.monitor.size();
    return FC_OK;
}

fc_status fc_lift_report_monitor(const fc_lift_report* r, double* out, size_t capacity) {
    if (!r) return null_arg("fc_lift_report_monitor");
    return copy_out(r->v.monitor, out, capacity, "fc_lift_report_monitor");
}

void fc_lift_report_free(fc_lift_report* r) { delete r; }

/* --- coarse ----------------------------------------------------------------*/

fc_status fc_run_coarse(const double* m0, double t0, const fc_strategy* s,
                        const fc_schedule* schedule, double dt, long k_steps, long m_inf,
                        size_t n_particles, fc_lift_mode lift_mode, int warm_start, uint64_t seed,
                        double t_end, const fc_ensemble* init_or_null, fc_trajectory** out) {
    if (!m0 || !s || !schedule || !out) return null_arg("fc_run_coarse");
    return guarded([&] {
        MacroState m{std::vector<double>(m0, m0 + s->v.num_observables()), s->v, t0};
        CoarseConfig cfg{s->v,
                         dt,
                         k_steps,
                         m_inf,
                         n_particles,
                         lift_mode == FC_LIFT_QUASI_EQUILIBRIUM ? LiftMode::quasi_equilibrium
                                                                : LiftMode::frozen_kappa,
                         seed,
                         warm_start != 0,
                         false,
                         0};
        std::optional<Ensemble> init;
        if (init_or_null) init = init_or_null->v;
        *out = new fc_trajectory{run_coarse(m, schedule->v, cfg, t_end, std::move(init))};
    });
}

fc_status fc_run_micro_reference(const fc_ensemble* init, const fc_schedule* schedule, double dt,
                                 double t_end, const fc_strategy* s, uint64_t seed,
                                 long record_every, fc_trajectory** out) {
    if (!init || !schedule || !s || !out) return null_arg("fc_run_micro_reference");
    return guarded([&] {
        *out = new fc_trajectory{
            run_micro_reference(init->v, schedule->v, dt, t_end, s->v, seed, record_every)};
    });
}

fc_status fc_trajectory_len(const fc_trajectory* t, size_t* out) {
    if (!t || !out) return null_arg("fc_trajectory_len");
    *out = t->v.size();
    return FC_OK;
}

fc_status fc_trajectory_num_vars(const fc_trajectory* t, int* out) {
    if (!t || !out) return null_arg("fc_trajectory_num_vars");
    *out = t->v.states.empty() ? 0 : static_cast<int>(t->v.states.front().values.size());
    return FC_OK;
}

fc_status fc_trajectory_column(const fc_trajectory* t, int which, double* out, size_t capacity) {
    if (!t) return null_arg("fc_trajectory_column");
    return guarded([&] {
        const int L = t->v.states.empty() ? 0 : static_cast<int>(t->v.states[0].values.size());
        std::vector<double> col(t->v.size());
        for (std::size_t i = 0; i < t->v.size(); ++i) {
            if (which == 0) {
                col[i] = t->v.times[i];
            } else if (which >= 1 && which <= L) {
                col[i] = t->v.states[i].values[which - 1];
            } else if (which == L + 1) {
                col[i] = t->v.stress[i];
            } else {
                throw InvalidArgumentError("fc_trajectory_column: column out of range");
            }
        }
        const fc_status st = copy_out(col, out, capacity, "fc_trajectory_column");
        if (st != FC_OK) throw DimensionMismatchError(g_last_error);
    });
}

fc_status fc_trajectory_write_csv(const fc_trajectory* t, const char* path) {
    if (!t || !path) return null_arg("fc_trajectory_write_csv");
    return guarded([&] { t->v.write_csv(path); });
}

void fc_trajectory_free(fc_trajectory* t) { delete t; }

/* --- FENE-P oracle ----------------------------------------------------------*/

fc_status fc_fenep_rhs(double m, double kappa_val, const fc_params* p, double* out) {
    if (!p || !out) return null_arg("fc_fenep_rhs");
    return guarded([&] { *out = fenep_rhs(m, kappa_val, p->v); });
}

fc_status fc_fenep_stress(double m, const fc_params* p, double* out) {
    if (!p || !out) return null_arg("fc_fenep_stress");
    return guarded([&] { *out = fenep_stress(m, p->v); });
}

fc_status fc_fenep_integrate(double m0, const fc_schedule* s, double dt, double t_end,
                             const fc_params* p, double* times, double* m, double* tau,
                             size_t capacity, size_t* len) {
    if (!s || !p || !len) return null_arg("fc_fenep_integrate");
    return guarded([&] {
        const FenepTrajectory traj = fenep_integrate(m0, s->v, dt, t_end, p->v);
        *len = traj.size();
        if (times || m || tau) {
            if (capacity < traj.size()) {
                throw DimensionMismatchError("fc_fenep_integrate: capacity too small");
            }
            if (times) std::memcpy(times, traj.times.data(), traj.size() * sizeof(double));
            if (m) std::memcpy(m, traj.m.data(), traj.size() * sizeof(double));
            if (tau) std::memcpy(tau, traj.tau.data(), traj.size() * sizeof(double));
        }
    });
}

/* --- quasi-equilibrium oracle -----------------------------------------------*/

fc_status fc_qe_solve(const double* target_values, const fc_strategy* s, fc_qe_density** out) {
    if (!target_values || !s || !out) return null_arg("fc_qe_solve");
    return guarded([&] {
        MacroState target{std::vector<double>(target_values,
                                              target_values + s->v.num_observables()),
                          s->v, 0.0};
        *out = new fc_qe_density{qe_solve(target, s->v, s->v.params())};
    });
}

fc_status fc_qe_nearest_feasible(const double* target_values, const fc_strategy* s,
                                 fc_qe_density** out) {
    if (!target_values || !s || !out) return null_arg("fc_qe_nearest_feasible");
    return guarded([&] {
        MacroState target{std::vector<double>(target_values,
                                              target_values + s->v.num_observables()),
                          s->v, 0.0};
        *out = new fc_qe_density{qe_nearest_feasible(target, s->v, s->v.params())};
    });
}

fc_status fc_qe_pdf(const fc_qe_density* d, double x, double* out) {
    if (!d || !out) return null_arg("fc_qe_pdf");
    return guarded([&] { *out = d->v.pdf(x); });
}

fc_status fc_qe_multipliers(const fc_qe_density* d, double* out, size_t capacity) {
    if (!d) return null_arg("fc_qe_multipliers");
    return copy_out(d->v.multipliers(), out, capacity, "fc_qe_multipliers");
}

fc_status fc_qe_moments(const fc_qe_density* d, double* out, size_t capacity) {
    if (!d) return null_arg("fc_qe_moments");
    return copy_out(d->v.moments(), out, capacity, "fc_qe_moments");
}

fc_status fc_qe_relative_entropy(const fc_qe_density* d, double* out) {
    if (!d || !out) return null_arg("fc_qe_relative_entropy");
    return guarded([&] { *out = d->v.relative_entropy(); });
}

fc_status fc_qe_write_csv(const fc_qe_density* d, int n_points, const char* path) {
    if (!d || !path) return null_arg("fc_qe_write_csv");
    return guarded([&] {
        if (n_points < 2) throw InvalidArgumentError("fc_qe_write_csv: n_points must be >= 2");
        CsvWriter csv(path);
        csv.row(std::vector<std::string>{"x", "phi"});
        const double lo = d->v.domain_lo();
        const double hi = d->v.domain_hi();
        for (int i = 0; i <= n_points; ++i) {
            const double x = lo + (hi - lo) * i / n_points;
            csv.row(std::vector<double>{x, d->v.pdf(x)});
        }
    });
}

void fc_qe_free(fc_qe_density* d) { delete d; }

/* --- histograms ---------------------------------------------------------- */

fc_status fc_histogram_bin(const fc_ensemble* e, int n_bins, fc_histogram** out) {
    if (!e || !out) return null_arg("fc_histogram_bin");
    return guarded([&] { *out = new fc_histogram{bin_ensemble(e->v, n_bins)}; });
}

fc_status fc_histogram_l1(const fc_histogram* h, const fc_histogram* ref, double* out) {
    if (!h || !ref || !out) return null_arg("fc_histogram_l1");
    return guarded([&] { *out = l1_distance(h->v, ref->v); });
}

fc_status fc_histogram_l1_density(const fc_histogram* h, const fc_qe_density* ref, double* out) {
    if (!h || !ref || !out) return null_arg("fc_histogram_l1_density");
    return guarded([&] { *out = l1_distance(h->v, ref->v); });
}

fc_status fc_histogram_write_csv(const fc_histogram* h, const char* path) {
    if (!h || !path) return null_arg("fc_histogram_write_csv");
    return guarded([&] {
        CsvWriter csv(path);
        csv.row(std::vector<std::string>{"bin_left", "bin_right", "count", "normalized_density"});
        for (int i = 0; i < h->v.n_bins(); ++i) {
            csv.row(std::vector<double>{h->v.edges[i], h->v.edges[i + 1],
                                        static_cast<double>(h->v.counts[i]), h->v.density(i)});
        }
    });
}

void fc_histogram_free(fc_histogram* h) { delete h; }

fc_status fc_batch_se(const double* series, size_t len, int n_batches, double* out) {
    if (!series || !out) return null_arg("fc_batch_se");
    return guarded(
        [&] { *out = batch_se(std::vector<double>(series, series + len), n_batches); });
}

/* --- experiments ----------------------------------------------------------*/

fc_status fc_config_validate(const char* text, char* token_buf, size_t capacity) {
    if (!text) return null_arg("fc_config_validate");
    return guarded([&] {
        const ExperimentConfig cfg = validate_config(text);
        if (token_buf && capacity > 0) {
            const std::string tok = cfg.strategy_token;
            std::strncpy(token_buf, tok.c_str(), capacity - 1);
            token_buf[capacity - 1] = '\0';
        }
    });
}

fc_status fc_run_experiment(const char* config_text, const char* out_dir, int64_t seed_override) {
    if (!config_text || !out_dir) return null_arg("fc_run_experiment");
    return guarded([&] {
        ExperimentConfig cfg = validate_config(config_text);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        run_experiment(cfg, out_dir);
    });
}

int fc_preset_count(void) { return static_cast<int>(presets().size()); }

const char* fc_preset_name(int index) {
    const auto& all = presets();
    if (index < 0 || index >= static_cast<int>(all.size())) return nullptr;
    return all[static_cast<std::size_t>(index)].name;
}

const char* fc_preset_description(int index) {
    const auto& all = presets();
    if (index < 0 || index >= static_cast<int>(all.size())) return nullptr;
    return all[static_cast<std::size_t>(index)].description;
}

const char* fc_preset_text(const char* name) {
    if (!name) return nullptr;
    const Preset* p = find_preset(name);
    return p ? p->text : nullptr;
}

} // extern "C"
