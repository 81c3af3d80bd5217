/* C interface to the coded distributed matrix multiplication library.
 *
 * Every function returns a cdmm_status. On failure the message of the most
 * recent error on the calling thread is available from cdmm_last_error().
 * Objects returned through out-parameters are owned by the caller and must be
 * released with the matching *_destroy function; strings with cdmm_string_free.
 */
#ifndef CDMM_CDMM_H
#define CDMM_CDMM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CDMM_API __declspec(dllexport)
#else
#define CDMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cdmm_status {
  CDMM_OK = 0,
  CDMM_INVALID_ARGUMENT = 1,
  CDMM_SEARCH_BOUND_EXCEEDED = 2,
  CDMM_ORDER_NOT_SUPPORTED = 3,
  CDMM_ORDER_MISMATCH = 4,
  CDMM_NOT_INVERTIBLE = 5,
  CDMM_ZERO_SCALE = 6,
  CDMM_DUPLICATE_POINTS = 7,
  CDMM_INDIVISIBLE_DIMENSIONS = 8,
  CDMM_SHAPE_MISMATCH = 9,
  CDMM_BAD_PARAMS = 10,
  CDMM_MISSING_NOISE = 11,
  CDMM_INSUFFICIENT_RESPONSES = 12,
  CDMM_BAND_VIOLATION = 13,
  CDMM_INCOMPLETE_COSET = 14,
  CDMM_INSUFFICIENT_GROUPS = 15,
  CDMM_INCOMPLETE_GROUP = 16,
  CDMM_INSUFFICIENT_LOCAL_RESPONSES = 17,
  CDMM_UNREPAIRABLE_GROUP = 18,
  CDMM_INCOMPLETE = 19,
  CDMM_SUBSET_SIZE_MISMATCH = 20,
  CDMM_TOO_LARGE = 21,
  CDMM_UNDECODABLE = 22,
  CDMM_CODEC_OVERFLOW = 23,
  CDMM_CONFIG_PARSE_ERROR = 24,
  CDMM_IO_ERROR = 25,
  CDMM_FIELD_MISMATCH = 26
} cdmm_status;

typedef struct cdmm_field cdmm_field;
typedef struct cdmm_matrix cdmm_matrix;
typedef struct cdmm_scheme cdmm_scheme;
typedef struct cdmm_report cdmm_report;

/* Kebab-case name of a status code ("ok", "undecodable", ...). */
CDMM_API const char* cdmm_status_name(int status);
/* Message of the last failure on this thread, "" if none. */
CDMM_API const char* cdmm_last_error(void);
CDMM_API void cdmm_string_free(char* s);

/* ---- prime fields ---- */
CDMM_API int cdmm_field_create(uint64_t modulus, cdmm_field** out);
/* Smallest prime >= min_modulus whose multiplicative group has every order. */
CDMM_API int cdmm_field_for_orders(const uint64_t* orders, size_t count, uint64_t min_modulus,
                                   cdmm_field** out);
CDMM_API void cdmm_field_destroy(cdmm_field* f);
CDMM_API uint64_t cdmm_field_modulus(const cdmm_field* f);
CDMM_API int cdmm_field_root_of_unity(const cdmm_field* f, uint64_t order, uint64_t* out);
CDMM_API int cdmm_field_mul(const cdmm_field* f, uint64_t a, uint64_t b, uint64_t* out);
CDMM_API int cdmm_field_inv(const cdmm_field* f, uint64_t a, uint64_t* out);

/* ---- matrices over F_p (row-major u64 entries) ---- */
CDMM_API int cdmm_matrix_create(size_t rows, size_t cols, cdmm_matrix** out);
CDMM_API int cdmm_matrix_from_data(size_t rows, size_t cols, const uint64_t* data, cdmm_matrix** out);
CDMM_API int cdmm_matrix_random(const cdmm_field* f, size_t rows, size_t cols, uint64_t seed,
                                cdmm_matrix** out);
CDMM_API void cdmm_matrix_destroy(cdmm_matrix* m);
CDMM_API size_t cdmm_matrix_rows(const cdmm_matrix* m);
CDMM_API size_t cdmm_matrix_cols(const cdmm_matrix* m);
CDMM_API int cdmm_matrix_get(const cdmm_matrix* m, size_t row, size_t col, uint64_t* out);
CDMM_API int cdmm_matrix_set(cdmm_matrix* m, size_t row, size_t col, uint64_t value);
CDMM_API int cdmm_matrix_multiply(const cdmm_field* f, const cdmm_matrix* a, const cdmm_matrix* b,
                                  cdmm_matrix** out);
/* Text format "rows cols modulus" then entries; modulus may be NULL. */
CDMM_API int cdmm_matrix_read_file(const char* path, cdmm_matrix** out, uint64_t* modulus);
CDMM_API int cdmm_matrix_write_file(const char* path, const cdmm_matrix* m, uint64_t modulus);
/* *out = 1 when shapes and entries agree. */
CDMM_API int cdmm_matrix_equal(const cdmm_matrix* a, const cdmm_matrix* b, int* out);

/* ---- schemes ---- */
typedef struct cdmm_scheme_params {
  const char* kind; /* POLY MATDOT EP SEP PS TSEP DFT LRC LRC_SECURE */
  size_t K1, K2, m, X, r, delta;
  size_t N;         /* 0: default worker count */
  uint64_t seed;
  uint64_t modulus; /* 0: chosen automatically */
  const char* orientation; /* NULL or "auto", "first", "second" */
} cdmm_scheme_params;

CDMM_API int cdmm_scheme_create(const cdmm_scheme_params* params, cdmm_scheme** out);
/* key=value text as accepted by the CLI --config files. */
CDMM_API int cdmm_scheme_from_config(const char* text, cdmm_scheme** out);
CDMM_API void cdmm_scheme_destroy(cdmm_scheme* s);
CDMM_API int cdmm_scheme_thresholds(const cdmm_scheme* s, size_t* best, size_t* worst);
CDMM_API int cdmm_scheme_worker_count(const cdmm_scheme* s, size_t* out);
/* Field the simulator would use for this scheme. */
CDMM_API int cdmm_scheme_field(const cdmm_scheme* s, cdmm_field** out);
/* mode: "auto", "exhaustive", "orbit", "sampling"; *exact = 0 for sampling bounds. */
CDMM_API int cdmm_scheme_measure(const cdmm_scheme* s, const char* mode, uint64_t seed, size_t* best,
                                 size_t* worst, int* exact);

/* ---- simulation ---- */
typedef struct cdmm_sim_options {
  size_t N; /* 0: scheme default */
  const size_t* stragglers;
  size_t straggler_count;
  const size_t* byzantine;
  size_t byzantine_count;
  int shuffle_arrivals;
  int verify; /* Freivalds check on each response */
  uint64_t seed;
} cdmm_sim_options;

/* Runs a job; a decode failure is reported through the report, not the return. */
CDMM_API int cdmm_run_job(const cdmm_scheme* s, const cdmm_matrix* a, const cdmm_matrix* b,
                          const cdmm_sim_options* options, cdmm_report** out);
CDMM_API void cdmm_report_destroy(cdmm_report* r);
/* Decode status as a cdmm_status value. */
CDMM_API int cdmm_report_status(const cdmm_report* r);
CDMM_API size_t cdmm_report_responses_used(const cdmm_report* r);
CDMM_API size_t cdmm_report_flagged_count(const cdmm_report* r);
CDMM_API const char* cdmm_report_path(const cdmm_report* r);
/* Copy of the decoded product; fails with CDMM_UNDECODABLE if none. */
CDMM_API int cdmm_report_decoded(const cdmm_report* r, cdmm_matrix** out);
CDMM_API int cdmm_report_csv(const cdmm_report* r, int include_timing, char** out);

/* ---- whole workflows used by the CLI ---- */
/* Comparison table for a grid config; format "csv" or "table".
 * *all_match = 1 when every measured row equals its closed form. */
CDMM_API int cdmm_thresholds_table(const char* grid_config, const char* format, uint64_t seed,
                                   char** out, int* all_match);
CDMM_API int cdmm_verify_examples(uint64_t seed, int include_timing, char** out, int* all_passed);
CDMM_API int cdmm_security_audit(const cdmm_scheme* s, size_t n_workers, uint64_t modulus,
                                 uint64_t seed, char** out, int* passed);
/* Trains coded and float-reference models. dataset_path may be NULL for the
 * synthetic set given by rows/cols in the config. */
CDMM_API int cdmm_glm_demo(const char* glm_config, const char* dataset_path, char** trace_csv,
                           double* max_weight_diff, size_t* flagged);

#ifdef __cplusplus
}
#endif

#endif
