/* C interface to the collision-coupled map lattice library.
 *
 * Every entry point returns a status code (CML_OK on success); the last
 * failure message is retrievable per thread via cml_last_error(). Scenario
 * handles are opaque and must be released with cml_scenario_close().
 */
#ifndef COLMAPS_H
#define COLMAPS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum cml_status {
    CML_OK = 0,
    CML_ERR_INVALID = 1,     /* bad arguments / unknown names */
    CML_ERR_VALIDATION = 2,  /* scenario failed validation */
    CML_ERR_NUMERIC = 3,     /* numerical failure (no convergence, overflow, ...) */
    CML_ERR_IO = 4           /* file system problems */
};

typedef struct cml_scenario cml_scenario;

typedef struct cml_rate_report {
    double xi_eps;
    double mu0_h;
    double mu0_lower, mu0_upper;
    int mu0_exact;
    double theta;
    double lambda_pred;
    double rate_pred;
    double rate_per_unit_pred;
    int n_directions;
    int periodic[8];   /* per direction: 1 periodic, 0 not */
    int k_value[8];    /* return exponent k(v); -1 when not periodic */
    int small_coupling_ok;
} cml_rate_report;

typedef struct cml_fit_result {
    double rate;
    double stderr_rate;
    long window_lo, window_hi;
} cml_fit_result;

typedef struct cml_spectral_result {
    double lambda;
    double gap_proxy;
    double residual;
    long iterations;
} cml_spectral_result;

typedef struct cml_qk_result {
    double theta_emp;
    double theta_windowed;
    long n_samples;
} cml_qk_result;

typedef struct cml_hitting_result {
    double ks_stat;
    double ks_weighted_sup;
    long censored;
    long samples;
} cml_hitting_result;

/* Thread-local message for the most recent failure. Never NULL. */
const char* cml_last_error(void);

/* Load a scenario from a config file, or from a built-in preset via the
 * "preset:NAME" form. NULL on failure. */
cml_scenario* cml_scenario_open(const char* path_or_preset);
/* Parse a scenario from config text. NULL on failure. */
cml_scenario* cml_scenario_parse(const char* text);
void cml_scenario_close(cml_scenario* sc);

/* Override one key, e.g. cml_scenario_set(sc, "run.seed", "42"). */
int cml_scenario_set(cml_scenario* sc, const char* dotted_key, const char* value);
/* Full validation; CML_OK or CML_ERR_VALIDATION. */
int cml_scenario_validate(const cml_scenario* sc);
/* Serialized config text into buf (NUL-terminated, truncated to buflen). */
int cml_scenario_text(const cml_scenario* sc, char* buf, size_t buflen);

/* Newline-separated preset names. */
int cml_preset_names(char* buf, size_t buflen);

/* Closed-form predictions only (no sampling). */
int cml_predict(const cml_scenario* sc, cml_rate_report* out);

/* Full orchestration: runs the stages enabled by the scenario and writes
 * manifest/summary/CSVs under out_dir (which is created). Any of the result
 * pointers may be NULL. Stages that did not run leave their struct zeroed. */
int cml_run(const cml_scenario* sc, const char* out_dir, cml_rate_report* report,
            cml_fit_result* fit, cml_spectral_result* spectral, cml_qk_result* qk,
            cml_hitting_result* hitting);

/* Sweeps; axis is "eps" or "N". values are parsed from a comma list. Writes
 * one CSV describing every row. */
int cml_sweep(const cml_scenario* sc, const char* axis, const char* comma_values,
              const char* out_csv);

/* Render a CSV produced by this library into a standalone SVG.
 * kind: survival | rate_vs_L | rate_vs_eps2 | hitting_law. */
int cml_emit_plot(const char* csv_path, const char* kind, const char* svg_path);

/* Library version string, e.g. "0.1.0". */
const char* cml_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COLMAPS_H */
