#ifndef FSORF_H
#define FSORF_H

/* C interface to the mixed FSO/RF relaying library.
 *
 * All handles are opaque and owned by the caller; free them with the matching
 * *_free function (NULL is accepted). Functions return an fsorf_status; on
 * failure fsorf_last_error() describes the problem. The error text is stored
 * per thread and stays valid until the next failing call on that thread.
 * Strings returned through handles live as long as the handle. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FSORF_API __declspec(dllexport)
#else
#define FSORF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsorf_status {
  FSORF_OK = 0,
  FSORF_ERR_DOMAIN = 1,      /* parameter outside a function's domain */
  FSORF_ERR_CONVERGENCE = 2, /* series or quadrature did not converge */
  FSORF_ERR_CONFIG = 3,      /* malformed or inconsistent configuration */
  FSORF_ERR_ARGUMENT = 4,    /* NULL handle, index out of range */
  FSORF_ERR_IO = 5,
  FSORF_ERR_INTERNAL = 6
} fsorf_status;

typedef enum fsorf_metric { FSORF_OUTAGE = 0, FSORF_BER = 1, FSORF_CAPACITY = 2 } fsorf_metric;

typedef enum fsorf_method {
  FSORF_ANALYTIC = 0,
  FSORF_ASYMPTOTIC = 1,
  FSORF_MONTE_CARLO = 2
} fsorf_method;

typedef struct fsorf_config fsorf_config;
typedef struct fsorf_sweep fsorf_sweep;
typedef struct fsorf_report fsorf_report;

FSORF_API const char* fsorf_version(void);
FSORF_API const char* fsorf_last_error(void);
/* Line and key of the last configuration error, 0 / "" when unknown. */
FSORF_API int fsorf_last_error_line(void);
FSORF_API const char* fsorf_last_error_key(void);
FSORF_API const char* fsorf_status_name(fsorf_status status);
/* FSORF_THREADS if set, else the hardware concurrency. */
FSORF_API int fsorf_default_threads(void);

/* --- configurations ----------------------------------------------------------------- */

FSORF_API fsorf_status fsorf_config_load(const char* path, fsorf_config** out);
FSORF_API fsorf_status fsorf_config_parse(const char* text, fsorf_config** out);
FSORF_API fsorf_status fsorf_config_from_preset(const char* name, fsorf_config** out);
FSORF_API void fsorf_config_free(fsorf_config* cfg);
/* Sets any config key; system keys accept comma lists. */
FSORF_API fsorf_status fsorf_config_set(fsorf_config* cfg, const char* key, const char* value);
/* Canonical key = value text. Free with fsorf_string_free. */
FSORF_API fsorf_status fsorf_config_serialize(const fsorf_config* cfg, char** out);
FSORF_API fsorf_status fsorf_config_curve_count(const fsorf_config* cfg, size_t* out);
FSORF_API void fsorf_string_free(char* s);

typedef struct fsorf_value {
  double value;
  double std_err;    /* NaN unless Monte-Carlo */
  double eval_error; /* NaN when the evaluator gives no bound */
} fsorf_value;

/* One metric at one grid point of one curve. x_db is read on the config's
 * axis. For the CSI-assisted relay, Monte-Carlo reports the exact SINR. */
FSORF_API fsorf_status fsorf_evaluate(const fsorf_config* cfg, size_t curve, fsorf_metric metric,
                                      fsorf_method method, double x_db, fsorf_value* out);

/* --- sweeps ------------------------------------------------------------------------- */

typedef struct fsorf_row {
  double x_db;
  const char* method;
  double value;
  double std_err;          /* NaN when absent */
  const char* eval_error;  /* error bound as text, or the failure message */
} fsorf_row;

FSORF_API fsorf_status fsorf_sweep_run(const fsorf_config* cfg, fsorf_sweep** out);
FSORF_API size_t fsorf_sweep_row_count(const fsorf_sweep* sweep);
FSORF_API fsorf_status fsorf_sweep_row(const fsorf_sweep* sweep, size_t index, fsorf_row* out);
/* Writes the CSV; path NULL, "" or "-" selects standard output. */
FSORF_API fsorf_status fsorf_sweep_write_csv(const fsorf_sweep* sweep, const char* path);
/* Destination named by the config's `output` key ("" for standard output). */
FSORF_API const char* fsorf_sweep_output(const fsorf_sweep* sweep);
FSORF_API void fsorf_sweep_free(fsorf_sweep* sweep);

/* --- presets ------------------------------------------------------------------------ */

FSORF_API size_t fsorf_preset_count(void);
FSORF_API const char* fsorf_preset_name(size_t index);
FSORF_API const char* fsorf_preset_description(size_t index);
FSORF_API const char* fsorf_preset_text(size_t index);

/* --- validation --------------------------------------------------------------------- */

typedef struct fsorf_check {
  int id; /* 1..8 acceptance criteria, 0 auxiliary */
  const char* name;
  int passed;
  int informational;
  const char* detail;
  double seconds;
} fsorf_check;

typedef void (*fsorf_check_callback)(const fsorf_check* check, const char* line, void* user);

typedef struct fsorf_validate_options {
  long long mc_samples;
  long long ks_samples;
  uint64_t seed;
  int threads;
  int corrupt_bk; /* negative control: perturbs b_1 before the constant check */
  const int* only; /* criterion ids to run; NULL or n_only = 0 runs all */
  size_t n_only;
  fsorf_check_callback on_check;
  void* user;
} fsorf_validate_options;

FSORF_API void fsorf_validate_options_init(fsorf_validate_options* opts);
FSORF_API fsorf_status fsorf_validate(const fsorf_validate_options* opts, fsorf_report** out);
FSORF_API size_t fsorf_report_count(const fsorf_report* report);
FSORF_API fsorf_status fsorf_report_check(const fsorf_report* report, size_t index,
                                          fsorf_check* out);
/* One formatted line per check, "PASS [3] ...". */
FSORF_API const char* fsorf_report_line(const fsorf_report* report, size_t index);
/* 1 when every gating check passed. */
FSORF_API int fsorf_report_passed(const fsorf_report* report);
FSORF_API void fsorf_report_free(fsorf_report* report);

#ifdef __cplusplus
}
#endif

#endif
