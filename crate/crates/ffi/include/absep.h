#ifndef ABSEP_H
#define ABSEP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum AbsepStatus {
  ABSEP_STATUS_OK = 0,
  ABSEP_STATUS_NULL_POINTER = 1,
  ABSEP_STATUS_LENGTH_MISMATCH = 2,
  ABSEP_STATUS_NEGATIVE_EIGENVALUE = 3,
  ABSEP_STATUS_TRACE_ERROR = 4,
  ABSEP_STATUS_INVALID_DIMS = 5,
  ABSEP_STATUS_UNSUPPORTED = 6,
  ABSEP_STATUS_INVALID_ARGUMENT = 7,
  ABSEP_STATUS_ITERATION_BUDGET_EXHAUSTED = 8,
  ABSEP_STATUS_INCONSISTENT = 9,
  ABSEP_STATUS_INTERNAL = 10,
  ABSEP_STATUS_PANIC = 11,
} AbsepStatus;

/*
 Aggregate verdict of a report.
 */
typedef enum AbsepAggregate {
  ABSEP_AGGREGATE_AS_CERTIFIED = 0,
  ABSEP_AGGREGATE_FULLY_SEP_CERTIFIED = 1,
  ABSEP_AGGREGATE_SAS_CERTIFIED = 2,
  ABSEP_AGGREGATE_SAP_CERTIFIED = 3,
  ABSEP_AGGREGATE_NOT_AP = 4,
  ABSEP_AGGREGATE_INCONCLUSIVE = 5,
} AbsepAggregate;

/*
 Result of a full criteria check.
 */
typedef struct AbsepReport AbsepReport;

/*
 A validated spectrum together with its dimension layout.
 */
typedef struct AbsepSpectrum AbsepSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Validates `len` eigenvalues for `C^n ⊗ C^m`.

 # Safety
 `values` must point to `len` doubles; `out` must be a valid pointer.
 */
enum AbsepStatus absep_spectrum_new_bipartite(const double *values,
                                              size_t len,
                                              size_t n,
                                              size_t m,
                                              struct AbsepSpectrum **out);

/*
 Validates `len` eigenvalues for `n` qudits of dimension `d`.

 # Safety
 As [`absep_spectrum_new_bipartite`].
 */
enum AbsepStatus absep_spectrum_new_multiqudit(const double *values,
                                               size_t len,
                                               size_t d,
                                               size_t n,
                                               struct AbsepSpectrum **out);

/*
 Validates `len` eigenvalues on the symmetric subspace of `n` qudits of dimension `d`.

 # Safety
 As [`absep_spectrum_new_bipartite`].
 */
enum AbsepStatus absep_spectrum_new_symmetric(const double *values,
                                              size_t len,
                                              size_t d,
                                              size_t n,
                                              struct AbsepSpectrum **out);

/*
 Number of eigenvalues.

 # Safety
 `spectrum` must be null or a live handle.
 */
size_t absep_spectrum_len(const struct AbsepSpectrum *spectrum);

/*
 Copies the sorted, normalized eigenvalues into `buf` (capacity `cap`).

 # Safety
 `spectrum` must be a live handle and `buf` must hold `cap` doubles.
 */
enum AbsepStatus absep_spectrum_values(const struct AbsepSpectrum *spectrum,
                                       double *buf,
                                       size_t cap);

/*
 # Safety
 `spectrum` must be null or a handle from `absep_spectrum_new_*` not yet freed.
 */
void absep_spectrum_free(struct AbsepSpectrum *spectrum);

/*
 Runs all applicable criteria and the hull search.

 # Safety
 `spectrum` must be a live handle and `out` a valid pointer.
 */
enum AbsepStatus absep_check(const struct AbsepSpectrum *spectrum,
                             double tol,
                             size_t max_iter,
                             struct AbsepReport **out);

/*
 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum AbsepStatus absep_report_aggregate(const struct AbsepReport *report, enum AbsepAggregate *out);

/*
 Serializes the report as JSON. Free the string with [`absep_string_free`].

 # Safety
 `report` must be a live handle and `out` a valid pointer.
 */
enum AbsepStatus absep_report_to_json(const struct AbsepReport *report, char **out);

/*
 # Safety
 `report` must be null or a handle from [`absep_check`] not yet freed.
 */
void absep_report_free(struct AbsepReport *report);

/*
 Hull membership over the built-in sets for the spectrum's layout.

 # Safety
 `spectrum` must be a live handle; `feasible` and `residual` valid pointers.
 */
enum AbsepStatus absep_hull_membership(const struct AbsepSpectrum *spectrum,
                                       double tol,
                                       size_t max_iter,
                                       bool *feasible,
                                       double *residual);

/*
 Random search for a unitary that makes the spectrum NPT.

 # Safety
 `spectrum` must be a live handle; `found` and `best_min_eig` valid pointers.
 */
enum AbsepStatus absep_falsify(const struct AbsepSpectrum *spectrum,
                               uint64_t samples,
                               uint64_t seed,
                               bool *found,
                               double *best_min_eig);

/*
 Reduction-map range `[α_−, α_+]` for `n` qudits of dimension `d`, on the
 full space or (if `symmetric`) the symmetric subspace.

 # Safety
 `alpha_minus` and `alpha_plus` must be valid pointers.
 */
enum AbsepStatus absep_alpha_bounds(size_t d,
                                    size_t n,
                                    bool symmetric,
                                    double *alpha_minus,
                                    double *alpha_plus);

/*
 Message of the last failed call on this thread, or null. Free with [`absep_string_free`].
 */
char *absep_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void absep_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABSEP_H */
