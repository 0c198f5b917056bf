/* geolift: synthetic geo-experiment panels, synthetic-control and panel
 * double-machine-learning estimators, and a Monte Carlo study runner.
 *
 * Every function returns a geolift_status. On failure the message is
 * available from geolift_last_error() on the calling thread until the next
 * call on that thread. Handles are opaque and owned by the caller, who
 * releases them with the matching *_free function. Strings returned through
 * char** parameters are released with geolift_string_free. Handles are
 * immutable after creation and may be shared across threads.
 */
#ifndef GEOLIFT_GEOLIFT_H_
#define GEOLIFT_GEOLIFT_H_

#include <stdint.h>

#if defined(_WIN32)
#if defined(GEOLIFT_BUILDING_LIBRARY)
#define GEOLIFT_API __declspec(dllexport)
#else
#define GEOLIFT_API __declspec(dllimport)
#endif
#else
#define GEOLIFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum geolift_status {
  GEOLIFT_OK = 0,
  GEOLIFT_ERR_INVALID_ARGUMENT = 1,
  GEOLIFT_ERR_DIMENSION = 2,
  GEOLIFT_ERR_NUMERICAL = 3,
  GEOLIFT_ERR_IO = 4,
  GEOLIFT_ERR_ESTIMATOR = 5,
  GEOLIFT_ERR_INTERNAL = 99
} geolift_status;

typedef struct geolift_panel geolift_panel;
typedef struct geolift_result geolift_result;
typedef struct geolift_report geolift_report;

typedef struct geolift_report_row {
  char model[32];
  int available;
  int n_success;
  int n_failed;
  double abs_bias;
  double signed_bias;
  double coverage;
  double power;
  double avg_ci_width;
} geolift_report_row;

GEOLIFT_API const char* geolift_version(void);
GEOLIFT_API const char* geolift_last_error(void);
GEOLIFT_API const char* geolift_status_string(geolift_status status);
GEOLIFT_API void geolift_string_free(char* s);

/* Panels */

/* settings_json: flat object of generator settings, or NULL for defaults.
 * scenario: "BASE", "S1" ... "S5". The panel keeps its ground truth. */
GEOLIFT_API geolift_status geolift_simulate(const char* settings_json, const char* scenario,
                                            uint64_t seed, uint64_t rep, geolift_panel** out);
/* truth_path may be NULL. */
GEOLIFT_API geolift_status geolift_panel_read_csv(const char* panel_path, const char* truth_path,
                                                  geolift_panel** out);
/* truth_path may be NULL; it must be NULL when the panel has no truth. */
GEOLIFT_API geolift_status geolift_panel_write_csv(const geolift_panel* panel,
                                                   const char* panel_path, const char* truth_path);
GEOLIFT_API geolift_status geolift_panel_dims(const geolift_panel* panel, int* n_units,
                                              int* n_weeks, int* t_pre, int* n_treated);
/* Fails with GEOLIFT_ERR_INVALID_ARGUMENT when the panel carries no truth. */
GEOLIFT_API geolift_status geolift_panel_true_att(const geolift_panel* panel, double* out);
/* Row-major N x T copy of the observed outcomes into a caller buffer of
 * `capacity` doubles. */
GEOLIFT_API geolift_status geolift_panel_outcomes(const geolift_panel* panel, double* buffer,
                                                  int64_t capacity);
GEOLIFT_API void geolift_panel_free(geolift_panel* panel);

/* Estimation */

/* method: asc-y, asc-dem, asc-dem-lag, cre-dml, twfe-dml, fd-dml, wg-dml.
 * options_json: estimator options object, or NULL for defaults. */
GEOLIFT_API geolift_status geolift_estimate(const geolift_panel* panel, const char* method,
                                            const char* options_json, uint64_t seed,
                                            geolift_result** out);
GEOLIFT_API geolift_status geolift_result_summary(const geolift_result* result, double* att_hat,
                                                  double* se, double* ci_low, double* ci_high,
                                                  int* converged);
/* Looks up a named diagnostic; GEOLIFT_ERR_INVALID_ARGUMENT when absent. */
GEOLIFT_API geolift_status geolift_result_diagnostic(const geolift_result* result,
                                                     const char* name, double* out);
GEOLIFT_API geolift_status geolift_result_to_json(const geolift_result* result, char** out_json);
GEOLIFT_API void geolift_result_free(geolift_result* result);

/* Monte Carlo studies */

/* study_json: {"scenario", "replications", "seed", "jobs", "estimators",
 * "sim", "options"}, all optional. out_dir may be NULL; otherwise report.md,
 * report.csv and replications.csv are written there. */
GEOLIFT_API geolift_status geolift_study_run(const char* study_json, const char* out_dir,
                                             geolift_report** out);
GEOLIFT_API geolift_status geolift_report_row_count(const geolift_report* report, int* out);
GEOLIFT_API geolift_status geolift_report_get_row(const geolift_report* report, int index,
                                                  geolift_report_row* out);
GEOLIFT_API geolift_status geolift_report_unavailable_count(const geolift_report* report,
                                                            int* out);
GEOLIFT_API geolift_status geolift_report_to_markdown(const geolift_report* report, char** out);
GEOLIFT_API geolift_status geolift_report_to_csv(const geolift_report* report, char** out);
GEOLIFT_API geolift_status geolift_report_replications_csv(const geolift_report* report,
                                                           char** out);
GEOLIFT_API void geolift_report_free(geolift_report* report);

#ifdef __cplusplus
}
#endif

#endif /* GEOLIFT_GEOLIFT_H_ */
