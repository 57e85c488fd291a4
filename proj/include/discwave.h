/* C interface to the discrete-wave stabilization library.
 *
 * All functions return dw_status; on failure dw_last_error() holds a
 * message (thread-local). Handles are freed with the matching *_free.
 */
#ifndef DISCWAVE_H
#define DISCWAVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dw_status {
    DW_OK = 0,
    DW_ERR_USAGE = 1,     /* bad arguments, config or file format */
    DW_ERR_NOCONV = 2,    /* numerical non-convergence */
    DW_ERR_VERIFY = 3,    /* cross-check mismatch */
    DW_ERR_INTERNAL = 4
} dw_status;

typedef struct dw_system dw_system;
typedef struct dw_wave dw_wave;
typedef struct dw_analysis dw_analysis;

const char* dw_last_error(void);
const char* dw_version(void);

/* --- systems ----------------------------------------------------------- */

typedef void (*dw_field_fn)(const double* x, double* fx, void* user);
typedef void (*dw_jac_fn)(const double* x, double* jac_row_major, void* user);

/* Description of a user-supplied system; also the plugin hook: a shared
 * object loaded by the CLI must export
 *     int discwave_describe_system(dw_system_desc* out);
 * returning 0 on success after filling the struct (pointers must stay
 * valid for the lifetime of the plugin). */
typedef struct dw_system_desc {
    const char* name;
    int dim;
    dw_field_fn field;
    dw_jac_fn jacobian; /* NULL = finite differences */
    void* user;
    const double* h_row_major; /* dim x dim */
    int n;
    int m;
    const double* x_guess; /* dim, may be NULL */
    double theta_guess;    /* 0 = not provided */
} dw_system_desc;

typedef int (*dw_describe_fn)(dw_system_desc* out);

/* params_json: optional {"key": number} overrides, NULL for defaults. */
dw_status dw_system_builtin(const char* name, const char* params_json, dw_system** out);
dw_status dw_system_custom(const dw_system_desc* desc, dw_system** out);
/* Tags a custom system with its origin ("plugin" + path) so wave files
 * record how to rebuild it. */
dw_status dw_system_set_origin(dw_system* sys, const char* kind, const char* path);
void dw_system_free(dw_system* sys);

int dw_system_dim(const dw_system* sys);
const char* dw_system_name(const dw_system* sys);

/* Max over n_samples seeded random probes x of ||f(h x) - h f(x)||. */
dw_status dw_system_equivariance(const dw_system* sys, unsigned long seed, int n_samples,
                                 double* max_residual);

/* --- orbit search / wave files ----------------------------------------- */

/* x_guess (length dim) and theta_guess override the system defaults when
 * non-NULL / positive. opts_json: optional {"ode_tol":..., "shooting_tol":...,
 * "max_iter":...}. */
dw_status dw_find_wave(const dw_system* sys, const double* x_guess, double theta_guess,
                       const char* opts_json, dw_wave** out);
void dw_wave_free(dw_wave* wave);

dw_status dw_wave_save(const dw_wave* wave, const char* path);
dw_status dw_wave_load(const dw_system* sys, const char* path, dw_wave** out);

/* Reads the stored system identity from a wave file without binding it.
 * String buffers receive at most *_cap bytes including the terminator;
 * params_json (freed with dw_string_free) receives the parameter map.
 * Any output may be NULL. */
dw_status dw_wave_peek_system(const char* path, char* kind, int kind_cap, char* name, int name_cap,
                              char* plugin_path, int path_cap, char** params_json);

dw_status dw_wave_info(const dw_wave* wave, double* anchor /* dim, may be NULL */,
                       double* period, double* theta_h, double* shooting_residual);
dw_status dw_wave_eval(const dw_wave* wave, double t, double* x_out);

/* One period sampled on samples+1 rows (t, x1..xN). */
dw_status dw_wave_write_trajectory(const dw_wave* wave, const char* csv_path, int samples);

/* --- analysis ----------------------------------------------------------- */

/* opts_json: optional {"gain_cap":..., "gains":[...], "eig_tol":...,
 * "sep_floor":..., "ode_tol":...}. */
dw_status dw_analyze(const dw_wave* wave, const char* opts_json, dw_analysis** out);
void dw_analysis_free(dw_analysis* analysis);

/* Serialized verdict report (fixed key order). Free with dw_string_free. */
dw_status dw_analysis_json(const dw_analysis* analysis, char** out);
void dw_string_free(char* s);

/* Writes verdict.json, spectrum.csv and roots_<i>.csv (characteristic roots
 * within root_radius, <= 0 picks 2.0) for each sampled gain into out_dir.
 * grid_m > 0 additionally runs the discretized-operator cross-check at that
 * grid, writes verify.csv, embeds the summary in the verdict and returns
 * DW_ERR_VERIFY on mismatch (after writing). */
dw_status dw_analysis_write_artifacts(const dw_analysis* analysis, const char* out_dir, int grid_m,
                                      double root_radius);

dw_status dw_analysis_stabilizable(const dw_analysis* analysis, int* out);
/* empty=1 means no stabilizing gain; unbounded=1 means reported lower end
 * is the gain cap standing in for an unbounded interval. */
dw_status dw_analysis_gain_interval(const dw_analysis* analysis, double* b_lo, double* b_hi,
                                    int* empty, int* unbounded);
dw_status dw_analysis_spectrum(const dw_analysis* analysis, double* re, double* im, int cap,
                               int* count);

/* --- simulation / verification ------------------------------------------ */

/* Simulates the controlled system from the wave history perturbed by
 * amplitude along the least-stable transverse direction, over the given
 * number of periods. Writes CSV when csv_path is non-NULL. Outputs the
 * initial and final distance to the orbit. */
dw_status dw_simulate(const dw_wave* wave, double gain, double amplitude, int periods,
                      const char* csv_path, double* dist_initial, double* dist_final);

/* Region chart + gain path CSVs into out_dir (region.csv, gain_path.csv;
 * the path file only when wave is non-NULL). */
dw_status dw_region_chart(const dw_wave* wave, const char* out_dir);

/* Discretized-operator cross-check at grid size grid_m for each gain;
 * writes a CSV table when csv_path is non-NULL. Returns DW_ERR_VERIFY when
 * the worst relative error exceeds tol (<= 0 picks the default 1e-2). */
dw_status dw_verify(const dw_wave* wave, const double* gains, int n_gains, int grid_m,
                    double tol, const char* csv_path, double* max_rel_err);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DISCWAVE_H */
