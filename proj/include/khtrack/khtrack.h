#ifndef KHTRACK_KHTRACK_H
#define KHTRACK_KHTRACK_H

/* C interface to the certified path tracker.
 *
 * Every function returns a kht_status; on failure a description is available
 * from kht_last_error() (thread-local, valid until the next call on the same
 * thread). Handles are opaque and released with their matching _free
 * function; strings returned through char** are released with
 * kht_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KHT_API __declspec(dllexport)
#else
#define KHT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kht_status {
  KHT_OK = 0,
  KHT_DIVISION_BY_INTERVAL_CONTAINING_ZERO,
  KHT_NON_FINITE_ENDPOINT,
  KHT_NON_POSITIVE_RADIUS,
  KHT_DIMENSION_MISMATCH,
  KHT_SINGULAR_MATRIX,
  KHT_DEGENERATE_TIME_INTERVAL,
  KHT_NO_CONVERGENCE,
  KHT_STEP_UNDERFLOW,
  KHT_MAX_STEPS_EXCEEDED,
  KHT_MALFORMED_CERTIFICATE,
  KHT_PARSE_ERROR,
  KHT_INVALID_ARGUMENT,
  KHT_ROOT_COUNT_MISMATCH,
  KHT_DEGENERATE_START,
  KHT_IO_ERROR,
  KHT_INTERNAL_ERROR
} kht_status;

typedef enum kht_mode { KHT_MODE_RECT = 0, KHT_MODE_TILTED = 1 } kht_mode;
typedef enum kht_extension { KHT_EXT_TAYLOR = 0, KHT_EXT_NAIVE = 1 } kht_extension;

typedef struct kht_complex {
  double re;
  double im;
} kht_complex;

typedef struct kht_tracker_config {
  double dt0;
  double r0;
  double lambda;
  int newton_iters;
  double newton_tol;
  long max_steps;
  kht_mode mode;
  kht_extension extension;
} kht_tracker_config;

typedef struct kht_problem kht_problem;
typedef struct kht_certificate kht_certificate;
typedef struct kht_verification kht_verification;
typedef struct kht_bench_report kht_bench_report;
typedef struct kht_dir_verification kht_dir_verification;

KHT_API const char* kht_last_error(void);
KHT_API const char* kht_status_name(kht_status status);
KHT_API void kht_string_free(char* s);

KHT_API void kht_tracker_config_default(kht_tracker_config* cfg);

/* ---- problems -------------------------------------------------------------
 * JSON: {"system": {...}, "p0": [[re, im], ...], "p1": [...],
 *        "starts": [[[re, im], ...], ...]}                                    */

KHT_API kht_status kht_problem_from_json(const char* json, kht_problem** out);
KHT_API size_t kht_problem_dimension(const kht_problem* problem);
KHT_API size_t kht_problem_start_count(const kht_problem* problem);
KHT_API void kht_problem_free(kht_problem* problem);

typedef struct kht_track_stats {
  int accepted;
  int rejected;
  double final_residual;
} kht_track_stats;

/* Tracks start `index`; on success *out receives the path certificate. */
KHT_API kht_status kht_problem_track(const kht_problem* problem, size_t index,
                                     const kht_tracker_config* cfg, kht_certificate** out,
                                     kht_track_stats* stats);

/* ---- certificates -------------------------------------------------------- */

KHT_API kht_status kht_certificate_from_json(const char* json, kht_certificate** out);
KHT_API kht_status kht_certificate_to_json(const kht_certificate* cert, char** out);
KHT_API size_t kht_certificate_segment_count(const kht_certificate* cert);
KHT_API size_t kht_certificate_dimension(const kht_certificate* cert);
/* Copies the certified endpoint into out[0..n). */
KHT_API kht_status kht_certificate_final_point(const kht_certificate* cert, kht_complex* out,
                                               size_t n);
KHT_API void kht_certificate_free(kht_certificate* cert);

typedef struct kht_segment_check {
  int existence;
  int uniqueness;
  int handoff;
  double residual_norm;
  const char* note; /* owned by the verification handle */
} kht_segment_check;

KHT_API kht_status kht_certificate_verify(const kht_certificate* cert, kht_verification** out);
KHT_API int kht_verification_passed(const kht_verification* v);
KHT_API int kht_verification_chain_ok(const kht_verification* v);
KHT_API int kht_verification_final_ok(const kht_verification* v);
KHT_API size_t kht_verification_segment_count(const kht_verification* v);
KHT_API size_t kht_verification_failed_segments(const kht_verification* v);
KHT_API kht_status kht_verification_segment(const kht_verification* v, size_t i,
                                            kht_segment_check* out);
KHT_API size_t kht_verification_problem_count(const kht_verification* v);
KHT_API const char* kht_verification_problem(const kht_verification* v, size_t i);
KHT_API void kht_verification_free(kht_verification* v);

/* ---- benchmarks ---------------------------------------------------------- */

typedef struct kht_bench_spec {
  const char* family; /* "newton", "random", "katsura", "lowrank" */
  double m;           /* newton homotopy parameter */
  int n;              /* random quadratic k, katsura n, low-rank n */
  uint64_t seed;
  int lowrank_identity; /* nonzero: start the low-rank path at the identity */
  kht_tracker_config cfg;
} kht_bench_spec;

typedef struct kht_bench_summary {
  size_t paths;
  size_t certified;
  int min_iterations;
  int max_iterations;
  double avg_iterations;
  double wall_seconds;
} kht_bench_summary;

typedef struct kht_bench_path {
  int certified;
  int accepted;
  int rejected;
  double final_residual;
  const char* error; /* empty when certified; owned by the report */
} kht_bench_path;

/* Problem JSON (see kht_problem_from_json) for the family's homotopy. */
KHT_API kht_status kht_bench_problem_json(const kht_bench_spec* spec, char** out);
/* Worker count comes from the KHTRACK_WORKERS environment variable. */
KHT_API kht_status kht_bench_run(const kht_bench_spec* spec, kht_bench_report** out);
KHT_API kht_status kht_bench_summary_get(const kht_bench_report* report, kht_bench_summary* out);
KHT_API kht_status kht_bench_path_get(const kht_bench_report* report, size_t i, kht_bench_path* out);
/* Writes report.json, timing.json, steps.csv and cert_<i>.json into dir. */
KHT_API kht_status kht_bench_write(const kht_bench_report* report, const char* dir);
KHT_API void kht_bench_report_free(kht_bench_report* report);

KHT_API kht_status kht_bench_verify_dir(const char* dir, kht_dir_verification** out);
KHT_API int kht_dir_verification_passed(const kht_dir_verification* v);
KHT_API size_t kht_dir_verification_count(const kht_dir_verification* v);
/* name and per-certificate result of entry i */
KHT_API kht_status kht_dir_verification_entry(const kht_dir_verification* v, size_t i,
                                              const char** name, int* passed,
                                              size_t* failed_segments);
KHT_API size_t kht_dir_verification_error_count(const kht_dir_verification* v);
KHT_API const char* kht_dir_verification_error(const kht_dir_verification* v, size_t i);
KHT_API void kht_dir_verification_free(kht_dir_verification* v);

#ifdef __cplusplus
}
#endif

#endif /* KHTRACK_KHTRACK_H */
