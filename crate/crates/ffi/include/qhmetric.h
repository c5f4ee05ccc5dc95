#ifndef QHMETRIC_H
#define QHMETRIC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum QhStatus {
  QH_STATUS_OK = 0,
  QH_STATUS_NULL_POINTER = 1,
  QH_STATUS_INVALID_ARGUMENT = 2,
  QH_STATUS_DIMENSION_MISMATCH = 3,
  QH_STATUS_SINGULAR = 4,
  QH_STATUS_NOT_HERMITIAN = 5,
  QH_STATUS_NOT_POSITIVE_DEFINITE = 6,
  QH_STATUS_COMPLEX_SPECTRUM = 7,
  QH_STATUS_DEFECTIVE = 8,
  QH_STATUS_QUASI_HERMITICITY_VIOLATION = 9,
  QH_STATUS_NUMERICAL = 10,
  QH_STATUS_PANIC = 11,
} QhStatus;

// Opaque observable chain.
typedef struct QhChain QhChain;

// Opaque square complex matrix.
typedef struct QhMatrix QhMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null.
//
// The pointer stays valid until the next failing call on the same thread.
const char *qh_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void qh_string_free(char *s);

// Creates a `dim × dim` matrix from row-major parts. `im` may be null.
//
// # Safety
// `re` (and `im` if non-null) must point to `dim * dim` doubles.
enum QhStatus qh_matrix_new(size_t dim,
                            const double *re,
                            const double *im,
                            struct QhMatrix **out_matrix);

// Parses a matrix from its JSON form `{"dim", "re", "im"}`.
//
// # Safety
// `json` must be a nul-terminated string.
enum QhStatus qh_matrix_from_json(const char *json, struct QhMatrix **out_matrix);

// Releases a matrix. Null is ignored.
//
// # Safety
// `m` must come from this library and not have been freed.
void qh_matrix_free(struct QhMatrix *m);

// # Safety
// Pointers must be valid or null.
enum QhStatus qh_matrix_dim(const struct QhMatrix *m, size_t *out_dim);

// Copies the row-major entries into `re` and `im`, each of length `len`.
//
// # Safety
// `re` and `im` must point to `len` writable doubles.
enum QhStatus qh_matrix_copy_entries(const struct QhMatrix *m, double *re, double *im, size_t len);

// Serializes a matrix to JSON; free the result with [`qh_string_free`].
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_matrix_to_json(const struct QhMatrix *m, char **out_json);

// Max-entry norm of `A − A†`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_hermitian_defect(const struct QhMatrix *m, double *out_defect);

// Whether every eigenvalue has `|Im λ| ≤ tol·‖H‖`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_spectral_reality(const struct QhMatrix *h,
                                  double tol,
                                  bool *out_real,
                                  double *out_max_imag);

// Spectral metric of `h` with unit weights.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_default_metric(const struct QhMatrix *h, struct QhMatrix **out_theta);

// Relative residual `‖L†Θ − ΘL‖ / (‖L‖·‖Θ‖)`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_check_quasi_hermitian(const struct QhMatrix *l,
                                       const struct QhMatrix *theta,
                                       double *out_residual);

// Builds a chain with `n_params + 1` factors.
//
// # Safety
// `params` must point to `n_params` valid matrix handles (may be null when
// `n_params` is 0).
enum QhStatus qh_chain_build(const struct QhMatrix *h,
                             const struct QhMatrix *theta,
                             const struct QhMatrix *const *params,
                             size_t n_params,
                             struct QhChain **out_chain);

// Parses a chain from JSON.
//
// # Safety
// `json` must be a nul-terminated string.
enum QhStatus qh_chain_from_json(const char *json, struct QhChain **out_chain);

// Releases a chain. Null is ignored.
//
// # Safety
// `c` must come from this library and not have been freed.
void qh_chain_free(struct QhChain *c);

// Number of factors `N`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_chain_n(const struct QhChain *c, size_t *out_n);

// Copy of observable `Λ_k`, `0 ≤ k ≤ N + 1`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_chain_observable(const struct QhChain *c, size_t k, struct QhMatrix **out_matrix);

// Copy of factor `Z_k`, `1 ≤ k ≤ N`.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_chain_factor(const struct QhChain *c, size_t k, struct QhMatrix **out_matrix);

// Serializes a chain to JSON; free the result with [`qh_string_free`].
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_chain_to_json(const struct QhChain *c, char **out_json);

// Checks the factor relations and the observability theorem at `tol`.
//
// `out_report` is optional; when non-null it receives a JSON object with
// `relations` and `theorem1` lists.
//
// # Safety
// Pointers must be valid or null.
enum QhStatus qh_chain_verify(const struct QhChain *c,
                              double tol,
                              bool *out_pass,
                              double *out_max_residual,
                              char **out_report);

// `exp(−iHt) ψ₀` with `ψ₀` and the result given as real/imaginary arrays of length `dim`.
//
// # Safety
// Input arrays must hold `dim` doubles (`psi_im` may be null); output arrays
// must hold `dim` writable doubles.
enum QhStatus qh_propagate(const struct QhMatrix *h,
                           const double *psi_re,
                           const double *psi_im,
                           size_t dim,
                           double t,
                           double *out_re,
                           double *out_im);

// `[[0, 1], [g², 0]]`.
//
// # Safety
// `out_matrix` must be valid or null.
enum QhStatus qh_toy_2x2(double g, struct QhMatrix **out_matrix);

// Tight-binding chain of length `d` with gain/loss `gamma` on the end sites.
//
// # Safety
// `out_matrix` must be valid or null.
enum QhStatus qh_pt_chain(size_t d, double gamma, struct QhMatrix **out_matrix);

// Exchange matrix of size `d`.
//
// # Safety
// `out_matrix` must be valid or null.
enum QhStatus qh_parity(size_t d, struct QhMatrix **out_matrix);

// Seeded random quasi-Hermitian `H` together with a witness metric.
//
// # Safety
// Out-pointers must be valid or null.
enum QhStatus qh_random_qh(size_t d,
                           uint64_t seed,
                           struct QhMatrix **out_h,
                           struct QhMatrix **out_theta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHMETRIC_H */
