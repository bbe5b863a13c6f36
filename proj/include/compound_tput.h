#ifndef COMPOUND_TPUT_H
#define COMPOUND_TPUT_H

/*
 * C interface to the Compound TCP throughput models.
 *
 * Three ways to estimate the average window / goodput of a Compound TCP
 * connection under random per-packet losses at rate p:
 *   - the deterministic-loss fluid model (closed form),
 *   - Monte-Carlo simulation of the per-RTT window chain, plus a
 *     truncated-state stationary solver for the same chain,
 *   - a small-p approximation built from the limit law of the scaled
 *     inter-loss time.
 *
 * Every function returns ct_status; on failure ct_last_error() carries a
 * human-readable message (thread-local, valid until the next failing
 * call on the same thread). Objects returned through ct_* handles must
 * be released with the matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CT_BUILD_SHARED)
#define CT_API __declspec(dllexport)
#else
#define CT_API __declspec(dllimport)
#endif
#else
#define CT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
    CT_OK = 0,
    CT_ERR_INVALID_ARGUMENT = 1,
    CT_ERR_CONFIG = 2,
    CT_ERR_NO_CONVERGENCE = 3,
    CT_ERR_IO = 4,
    CT_ERR_INTERNAL = 5
} ct_status;

CT_API const char* ct_status_str(ct_status status);
CT_API const char* ct_last_error(void);
CT_API const char* ct_version(void);

/* ------------------------------------------------------------------ */
/* Protocol parameters                                                 */

typedef struct ct_params {
    double alpha;        /* window gain, > 0 */
    double beta;         /* multiplicative decrease, in (0,1) */
    double k;            /* window exponent, in (0,1) */
    double gamma_thresh; /* queuing threshold, packets, >= 0 */
    double zeta;         /* queue-drain gain, >= 0 */
    double rtt;          /* round-trip time, seconds, > 0 */
} ct_params;

/* Standard Compound profile: alpha 0.125, beta 0.5, k 0.75, rtt 0.1 s. */
CT_API void ct_params_default(ct_params* out);

/* ------------------------------------------------------------------ */
/* Core window update                                                  */

/* One RTT of the two-component window update. q_next is the queue
 * estimate for the coming RTT, loss is nonzero if a loss was detected. */
CT_API ct_status ct_compound_update(const ct_params* params, double d, double l, double q_next,
                                    int loss, double* d_out, double* l_out);

/* Total-window increase for one loss-free RTT: max(1, alpha*w^k). */
CT_API ct_status ct_aggregate_increment(const ct_params* params, double w, double* out);

CT_API ct_status ct_scale_window(double w, double p, double k, double* out);
CT_API ct_status ct_scale_time(double g_rounds, double p, double k, double* out);

/* ------------------------------------------------------------------ */
/* Fluid model                                                         */

typedef struct ct_fluid_cycle {
    double x_start;
    double x_end;
    double tau_seconds;
    double packets;
} ct_fluid_cycle;

CT_API ct_status ct_fluid_window_at(const ct_params* params, double x0, double t_seconds,
                                    double* out);
CT_API ct_status ct_fluid_cycle_map(const ct_params* params, double x, double p,
                                    ct_fluid_cycle* out);
CT_API ct_status ct_fluid_fixed_point(const ct_params* params, double p, double* out);
CT_API ct_status ct_fluid_period(const ct_params* params, double p, double* out);
CT_API ct_status ct_fluid_avg_window(const ct_params* params, double p, double* out);

typedef struct ct_trajectory ct_trajectory;

/* Iterate the drop map from x0 for n_cycles; sample_dt > 0 also records
 * plot samples on a global grid (drop epochs are always exact samples,
 * duplicated pre/post). */
CT_API ct_status ct_fluid_simulate(const ct_params* params, double x0, double p,
                                   uint32_t n_cycles, double sample_dt, ct_trajectory** out);
CT_API size_t ct_trajectory_drop_count(const ct_trajectory* traj);
CT_API ct_status ct_trajectory_drop_window(const ct_trajectory* traj, size_t i, double* out);
CT_API size_t ct_trajectory_sample_count(const ct_trajectory* traj);
CT_API ct_status ct_trajectory_sample(const ct_trajectory* traj, size_t i, double* t_out,
                                      double* w_out);
/* CSV columns: t_seconds,window_packets */
CT_API ct_status ct_trajectory_write_csv(const ct_trajectory* traj, const char* path);
CT_API void ct_trajectory_free(ct_trajectory* traj);

/* ------------------------------------------------------------------ */
/* Window chain simulation and stationary solver                       */

typedef struct ct_sim_estimate {
    double mean_window;
    double goodput;      /* (1-p)*mean_window/rtt */
    double ci_halfwidth; /* 95%, batch means */
    uint64_t n_rounds;
    uint64_t n_losses;
    double mean_interloss_packets; /* expect 1/p */
    double interloss_ci;
    uint64_t n_intervals;
} ct_sim_estimate;

/* n_replicas independent replicas of n_rounds each, merged; the result
 * is bit-reproducible for a given (seed, n_replicas). warmup_rounds of 0
 * selects the default (10% of n_rounds). */
CT_API ct_status ct_simulate_chain(const ct_params* params, double p, uint64_t n_rounds,
                                   uint64_t warmup_rounds, uint64_t seed, uint32_t n_replicas,
                                   ct_sim_estimate* out);

CT_API ct_status ct_goodput(const ct_params* params, double mean_window, double p, double* out);

typedef struct ct_stationary ct_stationary;

/* w_max of 0 selects the default truncation (16x the fluid fixed point,
 * rounded up to a power of two) with doubling retries until the
 * tail-mass guard (< 1e-6) holds. */
CT_API ct_status ct_stationary_solve(const ct_params* params, double p, uint32_t w_max,
                                     ct_stationary** out);
CT_API ct_status ct_stationary_mean(const ct_stationary* dist, double* out);
CT_API ct_status ct_stationary_tail_mass(const ct_stationary* dist, double* out);
CT_API uint32_t ct_stationary_w_max(const ct_stationary* dist);
CT_API uint64_t ct_stationary_iterations(const ct_stationary* dist);
CT_API ct_status ct_stationary_prob(const ct_stationary* dist, uint32_t window, double* out);
CT_API void ct_stationary_free(ct_stationary* dist);

/* ------------------------------------------------------------------ */
/* Small-p limit model                                                 */

/* log P(scaled inter-loss time >= y) for scaled start window x. */
CT_API ct_status ct_gbar_log_ccdf(const ct_params* params, double x, double y, double* out);
/* Inverse-transform draw; u must lie strictly inside (0,1). */
CT_API ct_status ct_sample_gbar(const ct_params* params, double x, double u, double* out);
/* Scaled post-loss window after an inter-loss time of g. */
CT_API ct_status ct_step_vbar(const ct_params* params, double v, double g, double* out);

typedef struct ct_gbar_estimate {
    double mean_g;
    double ci_halfwidth;
    uint64_t n_samples;
    uint64_t burn_in;
} ct_gbar_estimate;

CT_API ct_status ct_estimate_mean_gbar(const ct_params* params, uint64_t n, uint64_t burn_in,
                                       double v0, uint64_t seed, ct_gbar_estimate* out);

/* window = p^{-1/(2-k)} / mean_g; goodput applies the (1-p)/rtt factor. */
CT_API ct_status ct_approx_avg_window(const ct_params* params, double p, double mean_g,
                                      double* out);
CT_API ct_status ct_approx_goodput(const ct_params* params, double p, double mean_g,
                                   double* out);

/* ------------------------------------------------------------------ */
/* Experiment harness                                                  */

typedef struct ct_config ct_config;

CT_API ct_status ct_config_create(ct_config** out);
CT_API ct_status ct_config_load_file(const char* path, ct_config** out);
CT_API ct_status ct_config_parse_json(const char* json_text, ct_config** out);
/* Returns a heap string; release with ct_string_free. */
CT_API ct_status ct_config_emit_json(const ct_config* cfg, char** out);
CT_API void ct_string_free(char* s);

CT_API ct_status ct_config_set_seed(ct_config* cfg, uint64_t seed);
CT_API ct_status ct_config_set_out_dir(ct_config* cfg, const char* out_dir);
CT_API ct_status ct_config_set_format(ct_config* cfg, const char* format);
CT_API ct_status ct_config_get_params(const ct_config* cfg, ct_params* out);
CT_API uint64_t ct_config_seed(const ct_config* cfg);
/* Nonzero when the seed came from a file or an explicit setter (the
 * COMPOUND_TPUT_SEED fallback applies only when this is zero). */
CT_API int ct_config_seed_is_set(const ct_config* cfg);
CT_API ct_status ct_config_get_sim(const ct_config* cfg, uint64_t* n_rounds,
                                   uint64_t* warmup_rounds, uint32_t* n_replicas);
CT_API ct_status ct_config_get_limit(const ct_config* cfg, uint64_t* n, uint64_t* burn_in,
                                     double* v0);
CT_API ct_status ct_config_get_out_dir(const ct_config* cfg, char* buf, size_t buflen);
CT_API ct_status ct_config_get_format(const ct_config* cfg, char* buf, size_t buflen);
CT_API void ct_config_free(ct_config* cfg);

typedef enum ct_model {
    CT_MODEL_FLUID = 0,
    CT_MODEL_SIM = 1,
    CT_MODEL_STATIONARY = 2,
    CT_MODEL_APPROX = 3
} ct_model;

typedef struct ct_result_cell {
    int present; /* model requested for this row */
    int ok;
    double mean_window;
    double goodput;
    double ci_halfwidth;
} ct_result_cell;

typedef struct ct_table ct_table;

/* Runs every requested (p, model) cell; a failed cell is recorded and
 * the remaining cells still run. Returns CT_OK even with failed cells;
 * check ct_table_all_ok. */
CT_API ct_status ct_run_tables(const ct_config* cfg, ct_table** out);
CT_API int ct_table_all_ok(const ct_table* table);
CT_API size_t ct_table_row_count(const ct_table* table);
CT_API ct_status ct_table_row_p(const ct_table* table, size_t row, double* out);
CT_API ct_status ct_table_cell(const ct_table* table, size_t row, ct_model model,
                               ct_result_cell* out);
CT_API ct_status ct_table_cell_note(const ct_table* table, size_t row, ct_model model, char* buf,
                                    size_t buflen);
/* CSV schema: p,model,mean_window_packets,goodput_pkts_per_sec,ci_halfwidth,notes */
CT_API ct_status ct_table_write_csv(const ct_table* table, const char* path);
CT_API ct_status ct_table_write_markdown(const ct_table* table, const char* path);
CT_API void ct_table_free(ct_table* table);

/* Writes the figure CSVs (fluid sawtooth trajectories and running-mean
 * traces of the scaled inter-loss time) under out_dir, or under the
 * config's out_dir when out_dir is NULL. */
CT_API ct_status ct_run_figures(const ct_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* COMPOUND_TPUT_H */
