/* kcmtest — kernel conditional-moment specification tests.
 *
 * C interface to the shared library. All objects are opaque handles owned
 * by the library; every fallible call returns a kcm_status and the last
 * failure message is available from kcm_last_error() (thread-local).
 */
#ifndef KCMTEST_H
#define KCMTEST_H

#include <stdint.h>

#if defined(_WIN32)
#define KCM_API __declspec(dllexport)
#else
#define KCM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kcm_status {
  KCM_OK = 0,
  KCM_ERROR_USAGE = 1,   /* bad arguments or configuration */
  KCM_ERROR_DATA = 2,    /* unparseable or degenerate input data */
  KCM_ERROR_NUMERIC = 3  /* solver failure, degenerate statistic */
} kcm_status;

typedef struct kcm_dataset kcm_dataset;
typedef struct kcm_config kcm_config;
typedef struct kcm_result kcm_result;  /* single-dataset test outcomes */
typedef struct kcm_report kcm_report;  /* Monte Carlo / sweep report */

KCM_API const char* kcm_version(void);

/* Message describing the most recent failure on this thread. */
KCM_API const char* kcm_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* CSV schema: header row required; first column y, remaining columns X. */
KCM_API kcm_status kcm_dataset_read_csv(const char* path, kcm_dataset** out);

/* x is row-major n x q. */
KCM_API kcm_status kcm_dataset_from_arrays(const double* y, const double* x,
                                           int64_t n, int64_t q,
                                           kcm_dataset** out);

/* dgp_id in dgp1..dgp7. */
KCM_API kcm_status kcm_dataset_generate(const char* dgp_id, int64_t n,
                                        int64_t q, uint64_t seed,
                                        kcm_dataset** out);

KCM_API int64_t kcm_dataset_rows(const kcm_dataset* data);
KCM_API int64_t kcm_dataset_cols(const kcm_dataset* data);
KCM_API void kcm_dataset_free(kcm_dataset* data);

/* ---- configuration ------------------------------------------------------ */

KCM_API kcm_config* kcm_config_new(void);
KCM_API void kcm_config_free(kcm_config* config);

/* Keys: dgp (dgp1..dgp7), n, q, reps, seed, threads, boot, alpha, tau,
 * split, select (nasym|asym), grid-size, lambda, j-override. */
KCM_API kcm_status kcm_config_set(kcm_config* config, const char* key,
                                  const char* value);

/* Tokens: basic | basic:all | generic:<scheme> | divergent:<scheme> |
 * gp | gp:trc | icm | icm:trc, with scheme one of
 * eigen | basel | harmonic | equal | poly:<p> | geom:<r> | exp:<beta>. */
KCM_API kcm_status kcm_config_add_statistic(kcm_config* config,
                                            const char* token);

/* ---- running ------------------------------------------------------------ */

KCM_API kcm_status kcm_run_test(const kcm_dataset* data,
                                const kcm_config* config, kcm_result** out);

KCM_API kcm_status kcm_run_monte_carlo(const kcm_config* config,
                                       kcm_report** out);

KCM_API kcm_status kcm_run_sweep(const kcm_config* config,
                                 const int* j_values, int64_t count,
                                 kcm_report** out);

/* ---- results ------------------------------------------------------------ */

KCM_API int64_t kcm_result_count(const kcm_result* result);
KCM_API kcm_status kcm_result_p_value(const kcm_result* result, int64_t index,
                                      double* out);
KCM_API kcm_status kcm_result_reject(const kcm_result* result, int64_t index,
                                     int* out);

/* Full outcome document with per-direction diagnostics (JSON). */
KCM_API kcm_status kcm_result_json(const kcm_result* result, char** out);

/* format: "csv" or "json". Monte Carlo reports render the aggregate table;
 * sweep reports render the J-by-statistic power table (csv only). */
KCM_API kcm_status kcm_report_table(const kcm_report* report,
                                    const char* format, char** out);

/* Per-replication records (csv); Monte Carlo reports only. */
KCM_API kcm_status kcm_report_records(const kcm_report* report, char** out);

/* Config echo, failure count and wall clock (JSON); Monte Carlo only. */
KCM_API kcm_status kcm_report_json(const kcm_report* report, char** out);

KCM_API void kcm_result_free(kcm_result* result);
KCM_API void kcm_report_free(kcm_report* report);
KCM_API void kcm_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KCMTEST_H */
