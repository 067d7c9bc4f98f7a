#ifndef QQL_H
#define QQL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QqlStatus {
  QQL_STATUS_OK = 0,
  QQL_STATUS_DOMAIN = 1,
  QQL_STATUS_PARAMETER = 2,
  QQL_STATUS_CAPACITY = 3,
  QQL_STATUS_MODEL = 4,
  QQL_STATUS_VALIDATION = 5,
  QQL_STATUS_IO = 6,
  QQL_STATUS_NULL_POINTER = 7,
  QQL_STATUS_BUFFER_TOO_SMALL = 8,
  QQL_STATUS_PANIC = 9,
} QqlStatus;

/*
 A reference algorithm with its measurement and family.
 */
typedef struct QqlBundle QqlBundle;

/*
 A family of Boolean functions.
 */
typedef struct QqlFamily QqlFamily;

/*
 Optimizer summary.
 */
typedef struct QqlOptSummary {
  double best_worst_case;
  /*
   `M(N, k) / D`.
   */
  double bound_ceiling;
  bool converged;
  size_t restarts_run;
  size_t workspace;
} QqlOptSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or NULL. Valid until the
 next failing call on the same thread.
 */
const char *qql_last_error_message(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void qql_string_free(char *s);

/*
 Parses a family file (`{"domain_size": N, "functions": ["+-+", ..]}`).

 # Safety
 `json` must be a NUL-terminated string and `out` writable.
 */
enum QqlStatus qql_family_from_json(const char *json, struct QqlFamily **out);

/*
 The `N` single-point functions on `1..N`.

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_family_grover(uint32_t domain_size, struct QqlFamily **out);

/*
 The `2^n` characters on `N = 2^n - 1`.

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_family_characters(uint32_t n, struct QqlFamily **out);

/*
 All `2^N` functions.

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_family_all(uint32_t domain_size, struct QqlFamily **out);

/*
 # Safety
 `family` must be a live handle and `out` writable.
 */
enum QqlStatus qql_family_len(const struct QqlFamily *family, size_t *out);

/*
 # Safety
 `family` must come from this library and not be freed twice.
 */
void qql_family_free(struct QqlFamily *family);

/*
 Single-query character distinguisher for `1 <= n <= 6`.

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_bundle_character_distinguisher(uint32_t n, struct QqlBundle **out);

/*
 `k`-query uniform-subset algorithm on all functions of `N` points.

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_bundle_uniform_subset(uint32_t domain_size, uint32_t k, struct QqlBundle **out);

/*
 Number of functions (and outcomes) of the bundle.

 # Safety
 `bundle` must be a live handle and `out` writable.
 */
enum QqlStatus qql_bundle_family_size(const struct QqlBundle *bundle, size_t *out);

/*
 Writes the `D x D` success matrix row-major (row = outcome) into `out`,
 which holds `len` doubles.

 # Safety
 `bundle` must be a live handle and `out` valid for `len` writes.
 */
enum QqlStatus qql_bundle_success_matrix(const struct QqlBundle *bundle, double *out, size_t len);

/*
 Guaranteed success probability as a double and, if `text` is not NULL,
 as an exact `"num/den"` string to release with [`qql_string_free`].

 # Safety
 `bundle` must be a live handle, `value` writable, `text` NULL or writable.
 */
enum QqlStatus qql_bundle_predicted_success(const struct QqlBundle *bundle,
                                            double *value,
                                            char **text);

/*
 # Safety
 `bundle` must come from this library and not be freed twice.
 */
void qql_bundle_free(struct QqlBundle *bundle);

/*
 `M(N, k)` as a decimal string to release with [`qql_string_free`].

 # Safety
 `out` must be writable.
 */
enum QqlStatus qql_m_sum_string(uint64_t domain_size, uint64_t k, char **out);

/*
 Smallest `k` the counting bound allows for sorting `n >= 2` items.

 # Safety
 `k_min` must be writable.
 */
enum QqlStatus qql_sorting_lower_bound(uint64_t n, uint64_t *k_min);

/*
 Whether `D` functions can be identified with probability `p` (a string
 such as `"7/8"`) using `k` queries on `N` points.

 # Safety
 `p` and `family_size` must be NUL-terminated strings, `out` writable.
 */
enum QqlStatus qql_is_feasible(uint64_t domain_size,
                               uint64_t k,
                               const char *p,
                               const char *family_size,
                               bool *out);

/*
 Runs the optimizer with default settings apart from the given ones.
 `workspace = 0` selects the default.

 # Safety
 `family` must be a live handle and `out` writable.
 */
enum QqlStatus qql_optimize(const struct QqlFamily *family,
                            size_t k,
                            size_t restarts,
                            size_t iterations,
                            uint64_t seed,
                            size_t workspace,
                            struct QqlOptSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QQL_H */
