/* C interface to the cubeforms library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a cf_status; on failure cf_last_error()
 * describes the problem (thread-local, valid until the next call on the
 * same thread). Strings returned through out-parameters are owned by the
 * handle they came from unless stated otherwise.
 */
#ifndef CUBEFORMS_H
#define CUBEFORMS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif

/* Values double as process exit codes of the command-line tool. */
typedef enum cf_status {
  CF_OK = 0,
  CF_VERIFICATION_FAILED = 1,
  CF_INVALID_ARGUMENT = 2,
  CF_NUMERICAL_ERROR = 3,
  CF_INTERNAL_ERROR = 4
} cf_status;

typedef struct cf_space cf_space;
typedef struct cf_config cf_config;
typedef struct cf_report cf_report;

CF_API const char* cf_version(void);
CF_API const char* cf_last_error(void);

/* ---- shape spaces ---------------------------------------------------- */

/* kind: "P", "Qminus", "serendipity", "SLambda1_2d" or "custom".
 * basis: ';'-separated forms for "custom", otherwise NULL. */
CF_API cf_status cf_space_create(const char* kind, int r, int k, int n, const char* basis,
                                 cf_space** out);
CF_API void cf_space_destroy(cf_space* space);
CF_API int cf_space_dim(const cf_space* space);
CF_API const char* cf_space_label(const cf_space* space);
/* Predicted L2 rates on parallelotope and on multilinear meshes. */
CF_API cf_status cf_space_predict_rates(const cf_space* space, int* s_affine,
                                        int* s_multilinear);
/* *result = 1 if span(inner) is a subspace of span(outer). */
CF_API cf_status cf_space_contains(const cf_space* outer, const cf_space* inner, int* result);

/* ---- exact verification suite ----------------------------------------- */

enum { CF_CHECK_CORRUPT_BASIS = 1 };

/* Called once per check; detail lists failing cases, one per line. */
typedef void (*cf_check_callback)(const char* check, int passed, int cases,
                                  const char* detail, void* user);

/* Returns CF_VERIFICATION_FAILED if any check fails. */
CF_API cf_status cf_check_run(int max_n, int max_r, unsigned flags, cf_check_callback callback,
                              void* user);

/* ---- experiment configs ---------------------------------------------- */

CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API cf_status cf_config_parse(const char* text, cf_config** out);
CF_API void cf_config_destroy(cf_config* config);
/* 0 restores the default rule. */
CF_API cf_status cf_config_set_quadrature(cf_config* config, int order);
CF_API const char* cf_config_name(const cf_config* config);
/* Canonical text form; parses back to an equal config. */
CF_API const char* cf_config_text(const cf_config* config);

/* ---- convergence studies ---------------------------------------------- */

typedef struct cf_row {
  int subdivisions;
  double h;
  double error;
  double rate_pair;
  double rate_lsq;
  int has_rate_pair;
  int has_rate_lsq;
} cf_row;

CF_API cf_status cf_converge(const cf_config* config, int threads, cf_report** out);
CF_API void cf_report_destroy(cf_report* report);
CF_API int cf_report_rows(const cf_report* report);
CF_API cf_status cf_report_row(const cf_report* report, int index, cf_row* row);
/* predicted: rate for the mesh family of the run. */
CF_API cf_status cf_report_prediction(const cf_report* report, int* s_affine, int* s_multilinear,
                                      int* predicted);
CF_API const char* cf_report_table(const cf_report* report);
CF_API cf_status cf_report_write_csv(const cf_report* report, const char* path);
/* JSON run record: config, version, timestamp, rows. */
CF_API cf_status cf_report_write_record(const cf_report* report, const char* path);
/* CF_OK if the last measured rate is >= predicted - tol, else
 * CF_VERIFICATION_FAILED. */
CF_API cf_status cf_report_assert_rates(const cf_report* report, double tol);

#ifdef __cplusplus
}
#endif

#endif /* CUBEFORMS_H */
