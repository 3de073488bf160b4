/*
 * framedual -- finite-frame dual constructions compensating for erasures.
 *
 * C interface to the library. Handles are opaque and immutable once
 * created; every function returns FD_OK or an fd_status error code, with a
 * human-readable message available from fd_last_error() (thread-local).
 *
 * Matrix buffers are column-major. Real matrices use rows*cols doubles;
 * complex matrices use 2*rows*cols doubles with interleaved (re, im) pairs.
 * Erasure indices are 1-based on this interface, matching the CLI and the
 * file formats.
 */
#ifndef FRAMEDUAL_H
#define FRAMEDUAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fd_status {
  FD_OK = 0,
  FD_ERR_BAD_SHAPE = 1,
  FD_ERR_NOT_A_FRAME = 2,
  FD_ERR_DIMENSION_MISMATCH = 3,
  FD_ERR_BAD_INDEX = 4,
  FD_ERR_BAD_K = 5,
  FD_ERR_NOT_A_DUAL = 6,
  FD_ERR_MRC_VIOLATED = 7,
  FD_ERR_MRC_RETRY_EXHAUSTED = 8,
  FD_ERR_IO = 9,
  FD_ERR_PARSE = 10,
  FD_ERR_INVALID_ARGUMENT = 11,
  FD_ERR_SINGULAR_GRAM = 12,
  FD_ERR_SINGULAR_OPERATOR = 13,
  FD_ERR_DENOMINATOR_VANISHES = 14,
  FD_ERR_INTERNAL = 15
} fd_status;

typedef enum fd_field { FD_FIELD_REAL = 0, FD_FIELD_COMPLEX = 1 } fd_field;

typedef enum fd_method {
  FD_METHOD_ITERATIVE = 0,
  FD_METHOD_GRAM = 1,
  FD_METHOD_OPERATOR = 2
} fd_method;

typedef struct fd_tolerances {
  double rank_tol;   /* relative numerical-rank cutoff */
  double dual_tol;   /* absolute spectral-norm duality residual bound */
  double denom_tol;  /* iterative denominator lower bound */
  double cond_limit; /* condition estimates above this raise a warning */
} fd_tolerances;

/* Fill with the library defaults (1e-10, 1e-9, 1e-12, 1e12). */
void fd_tolerances_default(fd_tolerances* tols);

typedef struct fd_frame fd_frame;
typedef struct fd_dual fd_dual;
typedef struct fd_erasure fd_erasure;
typedef struct fd_reduced fd_reduced;

const char* fd_version(void);
const char* fd_status_name(fd_status status);
/* Message for the most recent failing call on this thread. */
const char* fd_last_error(void);
void fd_string_free(char* s);
void fd_buffer_free(double* buffer);
int fd_set_threads(int n);
int fd_get_threads(void);

/* ---- FRM1 matrix files (field detected from the header line) ---- */
fd_status fd_matrix_load(const char* path, fd_field* field, int64_t* rows,
                         int64_t* cols, double** data);
fd_status fd_matrix_save(const char* path, fd_field field, int64_t rows,
                         int64_t cols, const double* data);
fd_status fd_numerical_rank(fd_field field, int64_t rows, int64_t cols,
                            const double* data, double rank_tol, int64_t* rank);

/* ---- frames ---- */
fd_status fd_frame_create(fd_field field, int64_t rows, int64_t cols,
                          const double* data, double rank_tol, fd_frame** out);
fd_status fd_frame_random(fd_field field, int64_t rows, int64_t cols,
                          uint64_t seed, double rank_tol, fd_frame** out);
fd_status fd_frame_load(const char* path, double rank_tol, fd_frame** out);
fd_status fd_frame_save(const fd_frame* frame, const char* path);
fd_status fd_frame_dims(const fd_frame* frame, fd_field* field, int64_t* rows,
                        int64_t* cols);
fd_status fd_frame_data(const fd_frame* frame, double* out, size_t out_len);
/* Optimal frame bounds: extreme eigenvalues of the frame operator. */
fd_status fd_frame_bounds(const fd_frame* frame, double* lower, double* upper);
void fd_frame_destroy(fd_frame* frame);

/* ---- dual pairs ---- */
fd_status fd_canonical_dual(const fd_frame* frame, double cond_limit,
                            fd_dual** out);
fd_status fd_pinv_dual(const fd_frame* frame, fd_dual** out);
fd_status fd_random_dual(const fd_dual* canonical, uint64_t seed, double spread,
                         double dual_tol, fd_dual** out);
/* Wrap an externally supplied dual matrix (same layout as the frame data);
 * fails with FD_ERR_NOT_A_DUAL if the duality residual exceeds dual_tol. */
fd_status fd_dual_attach(const fd_frame* frame, const double* data,
                         double dual_tol, fd_dual** out);
fd_status fd_dual_info(const fd_dual* dual, int* is_canonical, double* residual,
                       double* condition_estimate);
fd_status fd_dual_data(const fd_dual* dual, double* out, size_t out_len);
fd_status fd_dual_save(const fd_dual* dual, const char* path);
/* Spectral norm of Z X^H - I for an arbitrary candidate dual matrix. */
fd_status fd_duality_error(const fd_frame* frame, const double* dual_data,
                           double* out);
void fd_dual_destroy(fd_dual* dual);

/* ---- erasure sets ---- */
fd_status fd_erasure_create(int64_t total, const int64_t* one_based, int64_t k,
                            fd_erasure** out);
fd_status fd_erasure_random(int64_t total, int64_t k, uint64_t seed,
                            fd_erasure** out);
fd_status fd_erasure_info(const fd_erasure* erasure, int64_t* total, int64_t* k);
fd_status fd_erasure_indices(const fd_erasure* erasure, int64_t* out,
                             size_t out_len);
void fd_erasure_destroy(fd_erasure* erasure);

/* Minimal redundancy condition: do the surviving elements still span? */
fd_status fd_mrc_check(const fd_frame* frame, const fd_erasure* erasure,
                       double rank_tol, int* ok);

/* ---- reduced duals ---- */
/* Construction failures come back as FD_ERR_SINGULAR_GRAM,
 * FD_ERR_SINGULAR_OPERATOR or FD_ERR_DENOMINATOR_VANISHES. */
fd_status fd_reduce(const fd_dual* dual, const fd_erasure* erasure,
                    fd_method method, const fd_tolerances* tols,
                    fd_reduced** out);
fd_status fd_reduced_info(const fd_reduced* reduced, fd_method* method,
                          int64_t* rows, int64_t* cols, double* residual);
fd_status fd_reduced_data(const fd_reduced* reduced, double* out, size_t out_len);
/* Writes the reduced dual in FRM1 form, plus a JSON sidecar
 * {method, erased_indices, duality_residual, steps} when sidecar_json_path
 * is non-NULL. */
fd_status fd_reduced_save(const fd_reduced* reduced, const char* frm_path,
                          const char* sidecar_json_path);
void fd_reduced_destroy(fd_reduced* reduced);

/* Run all three constructions and report agreement as a JSON document. */
fd_status fd_equivalence_json(const fd_dual* dual, const fd_erasure* erasure,
                              double tol, const fd_tolerances* tols,
                              char** json_out);

/* Seeded standard-normal signal of length dim (buffer dim or 2*dim). */
fd_status fd_random_signal(fd_field field, int64_t dim, uint64_t seed,
                           double* out);

/* ---- transmission ----
 * Encodes the signal (length r, or 2r interleaved when complex), erases the
 * given coefficients, reconstructs via the chosen construction and reports
 * as JSON. Returns FD_OK when recovered, FD_ERR_MRC_VIOLATED or the
 * construction failure code otherwise; json_out is filled in all three
 * cases. */
fd_status fd_transmit_json(const fd_dual* dual, const fd_erasure* erasure,
                           const double* signal, fd_method method,
                           const fd_tolerances* tols, char** json_out);

/* ---- benchmark ----
 * config_json: array (or {"configs": [...]}) of objects with n, r, k and
 * optional seed, reps, warmup, field, spread, tolerance overrides. Writes
 * CSV to csv_path (unless NULL) and/or returns the CSV text. */
fd_status fd_bench_run(const char* config_json, const char* csv_path,
                       char** csv_text_out);

#ifdef __cplusplus
}
#endif

#endif /* FRAMEDUAL_H */
