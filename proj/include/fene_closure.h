/* SPDX-License-Identifier: Apache-2.0
 *
 * C API for the FENE numerical-closure engine. All entry points return an
 * fc_status; results come back through out-parameters. Objects are opaque
 * handles released with their matching fc_*_free (free functions accept
 * NULL). Error messages for the current thread are available from
 * fc_last_error() until the next failing call.
 */
#ifndef FENE_CLOSURE_H
#define FENE_CLOSURE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define FC_API __declspec(dllexport)
#else
#  define FC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
    FC_OK = 0,
    FC_ERR_INVALID_ARGUMENT = 1,
    FC_ERR_DOMAIN = 2,
    FC_ERR_MISSING_MOMENT = 3,
    FC_ERR_DIMENSION_MISMATCH = 4,
    FC_ERR_REJECTION_OVERFLOW = 5,
    FC_ERR_NEWTON_DIVERGENCE = 6,
    FC_ERR_SINGULAR_JACOBIAN = 7,
    FC_ERR_INFEASIBLE_MOMENTS = 8,
    FC_ERR_QUADRATURE = 9,
    FC_ERR_SUPPORT_VIOLATION = 10,
    FC_ERR_BIN_MISMATCH = 11,
    FC_ERR_TOO_FEW_BATCHES = 12,
    FC_ERR_PARSE = 13,
    FC_ERR_IO = 14,
    FC_ERR_INTERNAL = 15,
    FC_ERR_NULL_POINTER = 16
} fc_status;

typedef enum fc_force_model {
    FC_FORCE_HOOKEAN = 0,
    FC_FORCE_FENE = 1,
    FC_FORCE_FENEP = 2
} fc_force_model;

typedef enum fc_lift_mode {
    FC_LIFT_FROZEN_KAPPA = 0,
    FC_LIFT_QUASI_EQUILIBRIUM = 1
} fc_lift_mode;

typedef struct fc_params fc_params;
typedef struct fc_schedule fc_schedule;
typedef struct fc_strategy fc_strategy;
typedef struct fc_ensemble fc_ensemble;
typedef struct fc_lift_report fc_lift_report;
typedef struct fc_trajectory fc_trajectory;
typedef struct fc_qe_density fc_qe_density;
typedef struct fc_histogram fc_histogram;

/* --- library ------------------------------------------------------------ */

FC_API const char* fc_version(void);
FC_API const char* fc_last_error(void);
FC_API fc_status fc_set_threads(int n);
FC_API int fc_threads(void);

/* --- model parameters ----------------------------------------------------*/

FC_API fc_status fc_params_create(double b, double we, double eps, fc_force_model force,
                                  fc_params** out);
FC_API void fc_params_free(fc_params* p);
FC_API fc_status fc_force(const fc_params* p, double x, const double* msq_or_null, double* out);
FC_API fc_status fc_equilibrium_density(double x, double b, double* out);

/* --- flow schedules ------------------------------------------------------*/

FC_API fc_status fc_schedule_zero(fc_schedule** out);
FC_API fc_status fc_schedule_constant(double rate, fc_schedule** out);
FC_API fc_status fc_schedule_complex(fc_schedule** out);
FC_API fc_status fc_schedule_tabulated(const double* times, const double* values, size_t n,
                                       fc_schedule** out);
FC_API fc_status fc_schedule_from_csv(const char* path, fc_schedule** out);
FC_API fc_status fc_schedule_kappa(const fc_schedule* s, double t, double* out);
FC_API void fc_schedule_free(fc_schedule* s);

/* --- strategies ----------------------------------------------------------*/

/* token: "even:L" | "even+stress:L" | "cascade" */
FC_API fc_status fc_strategy_create(const char* token, const fc_params* p, fc_strategy** out);
FC_API fc_status fc_strategy_num_observables(const fc_strategy* s, int* out);
FC_API void fc_strategy_free(fc_strategy* s);

/* --- ensembles -----------------------------------------------------------*/

FC_API fc_status fc_ensemble_sample_equilibrium(size_t n, const fc_params* p, uint64_t seed,
                                                uint32_t stream, fc_ensemble** out);
FC_API fc_status fc_ensemble_from_data(const double* configs, size_t n, const fc_params* p,
                                       double time, fc_ensemble** out);
FC_API fc_status fc_ensemble_size(const fc_ensemble* e, size_t* out);
FC_API fc_status fc_ensemble_time(const fc_ensemble* e, double* out);
FC_API fc_status fc_ensemble_copy_data(const fc_ensemble* e, double* out, size_t capacity);
FC_API void fc_ensemble_free(fc_ensemble* e);

/* Advances the ensemble by k_steps Euler-Maruyama steps of size dt in place;
 * simulate-phase noise is keyed by start_step + i. */
FC_API fc_status fc_simulate(fc_ensemble* e, const fc_schedule* s, double dt, long k_steps,
                             uint64_t seed, uint32_t start_step);

/* values must hold fc_strategy_num_observables entries. */
FC_API fc_status fc_restrict(const fc_ensemble* e, const fc_strategy* s, double* values);
FC_API fc_status fc_stress(const fc_ensemble* e, const fc_params* p, double* out);

/* --- lifting -------------------------------------------------------------*/

/* init_kind: 0 = given ensemble (init != NULL), 1 = fresh equilibrium
 * sample, 2 = uniform draws. Produces an ensemble whose restriction equals
 * target_values to the Newton tolerance. */
FC_API fc_status fc_lift(const double* target_values, double target_time, const fc_strategy* s,
                         double kappa_frozen, double dt, long m_inf, int stop_at_plateau,
                         long plateau_window, uint32_t lift_step_base, int init_kind,
                         const fc_ensemble* init, size_t n_particles, uint64_t seed,
                         fc_lift_report** out);
FC_API fc_status fc_lift_report_ensemble(const fc_lift_report* r, fc_ensemble** out);
FC_API fc_status fc_lift_report_steps(const fc_lift_report* r, long* steps_run,
                                      long* plateau_step);
FC_API fc_status fc_lift_report_monitor_len(const fc_lift_report* r, size_t* out);
FC_API fc_status fc_lift_report_monitor(const fc_lift_report* r, double* out, size_t capacity);
FC_API void fc_lift_report_free(fc_lift_report* r);

/* --- coarse time-stepper ------------------------------------------------ */

FC_API fc_status fc_run_coarse(const double* m0, double t0, const fc_strategy* s,
                               const fc_schedule* schedule, double dt, long k_steps, long m_inf,
                               size_t n_particles, fc_lift_mode lift_mode, int warm_start,
                               uint64_t seed, double t_end, const fc_ensemble* init_or_null,
                               fc_trajectory** out);
FC_API fc_status fc_run_micro_reference(const fc_ensemble* init, const fc_schedule* schedule,
                                        double dt, double t_end, const fc_strategy* s,
                                        uint64_t seed, long record_every, fc_trajectory** out);
FC_API fc_status fc_trajectory_len(const fc_trajectory* t, size_t* out);
FC_API fc_status fc_trajectory_num_vars(const fc_trajectory* t, int* out);
/* copies column `which`: 0 = time, 1..L = M_l, L+1 = tau_p */
FC_API fc_status fc_trajectory_column(const fc_trajectory* t, int which, double* out,
                                      size_t capacity);
FC_API fc_status fc_trajectory_write_csv(const fc_trajectory* t, const char* path);
FC_API void fc_trajectory_free(fc_trajectory* t);

/* --- FENE-P macroscopic oracle ------------------------------------------ */

FC_API fc_status fc_fenep_rhs(double m, double kappa_val, const fc_params* p, double* out);
FC_API fc_status fc_fenep_stress(double m, const fc_params* p, double* out);
/* fills times/m/tau (each of length floor(t_end/dt)+1) when non-NULL */
FC_API fc_status fc_fenep_integrate(double m0, const fc_schedule* s, double dt, double t_end,
                                    const fc_params* p, double* times, double* m, double* tau,
                                    size_t capacity, size_t* len);

/* --- quasi-equilibrium oracle ------------------------------------------- */

FC_API fc_status fc_qe_solve(const double* target_values, const fc_strategy* s,
                             fc_qe_density** out);
FC_API fc_status fc_qe_nearest_feasible(const double* target_values, const fc_strategy* s,
                                        fc_qe_density** out);
FC_API fc_status fc_qe_pdf(const fc_qe_density* d, double x, double* out);
FC_API fc_status fc_qe_multipliers(const fc_qe_density* d, double* out, size_t capacity);
FC_API fc_status fc_qe_moments(const fc_qe_density* d, double* out, size_t capacity);
FC_API fc_status fc_qe_relative_entropy(const fc_qe_density* d, double* out);
FC_API fc_status fc_qe_write_csv(const fc_qe_density* d, int n_points, const char* path);
FC_API void fc_qe_free(fc_qe_density* d);

/* --- histograms and statistics ------------------------------------------ */

FC_API fc_status fc_histogram_bin(const fc_ensemble* e, int n_bins, fc_histogram** out);
FC_API fc_status fc_histogram_l1(const fc_histogram* h, const fc_histogram* ref, double* out);
FC_API fc_status fc_histogram_l1_density(const fc_histogram* h, const fc_qe_density* ref,
                                         double* out);
FC_API fc_status fc_histogram_write_csv(const fc_histogram* h, const char* path);
FC_API void fc_histogram_free(fc_histogram* h);
FC_API fc_status fc_batch_se(const double* series, size_t len, int n_batches, double* out);

/* --- experiments ---------------------------------------------------------*/

/* Validates a config document; on success writes the canonical strategy
 * token into token_buf (if non-NULL). */
FC_API fc_status fc_config_validate(const char* text, char* token_buf, size_t capacity);
/* Runs a full experiment from config text; CSVs and manifest.json land in
 * out_dir. seed_override < 0 keeps the config seed. */
FC_API fc_status fc_run_experiment(const char* config_text, const char* out_dir,
                                   int64_t seed_override);
FC_API int fc_preset_count(void);
FC_API const char* fc_preset_name(int index);
FC_API const char* fc_preset_description(int index);
FC_API const char* fc_preset_text(const char* name);

#ifdef __cplusplus
}
#endif

#endif /* FENE_CLOSURE_H */
