#ifndef FIBRGF_H
#define FIBRGF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FibrgfStatus {
  FIBRGF_STATUS_OK = 0,
  FIBRGF_STATUS_NULL_POINTER = 1,
  FIBRGF_STATUS_INVALID_ARGUMENT = 2,
  FIBRGF_STATUS_PARSE = 3,
  FIBRGF_STATUS_RESOURCE_LIMIT = 4,
  FIBRGF_STATUS_INVARIANT_VIOLATION = 5,
  // The guesser found no rational function within the bounds.
  FIBRGF_STATUS_NO_FIT = 6,
  // A verification ran and reported `fail` or `inconclusive`.
  FIBRGF_STATUS_CHECK_FAILED = 7,
  FIBRGF_STATUS_PANIC = 8,
  FIBRGF_STATUS_INTERNAL = 9,
} FibrgfStatus;

// Expanded product polynomial with integer coefficients.
typedef struct FibrgfProduct FibrgfProduct;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// `prod_{i=1}^n (1 + t x^{F^{(k)}_{i+k-1}})`; `k = 2` gives the Fibonacci case.
//
// # Safety
// `out` must be a valid pointer; the handle is released with [`fibrgf_product_free`].
enum FibrgfStatus fibrgf_product_kbonacci(uint32_t k,
                                          int64_t t,
                                          uint32_t n,
                                          struct FibrgfProduct **out);

// Stern's product `prod_{i=0}^{n-1} (1 + x^{2^i} + x^{2^{i+1}})`.
//
// # Safety
// `out` must be a valid pointer; the handle is released with [`fibrgf_product_free`].
enum FibrgfStatus fibrgf_product_stern(uint32_t n, struct FibrgfProduct **out);

// # Safety
// `p` must be null or a handle from this library not yet freed.
void fibrgf_product_free(struct FibrgfProduct *p);

// Highest exponent with a nonzero coefficient.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum FibrgfStatus fibrgf_product_degree(const struct FibrgfProduct *p, uint64_t *out);

// Coefficient of `x^e` as a decimal string (zero beyond the degree).
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum FibrgfStatus fibrgf_product_coefficient(const struct FibrgfProduct *p, uint64_t e, char **out);

// `sum_j prod_i c(j+i)^{alpha_i}` over the coefficients, as a decimal string.
//
// # Safety
// `p` must be a live handle, `alpha` must point to `len` values, `out` must be valid.
enum FibrgfStatus fibrgf_product_corr_sum(const struct FibrgfProduct *p,
                                          const uint32_t *alpha,
                                          uintptr_t len,
                                          char **out);

// Fit a rational generating function to `values[0..len]`.
//
// On success `out` receives JSON `{"num": [...], "den": [...], "form": "...",
// "den_max_used": d}`; without a fit the status is `NoFit` and `out` is untouched.
//
// # Safety
// `values` must point to `len` integers and `out` must be valid.
enum FibrgfStatus fibrgf_guess(const int64_t *values,
                               uintptr_t len,
                               uint32_t den_max,
                               uint32_t holdout,
                               char **out);

// Run the named verification with default parameters; `out` receives the
// JSON report whenever the check ran, including `CheckFailed`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum FibrgfStatus fibrgf_verify(const char *name, char **out);

// Message for the last non-OK status on this thread, or null. Valid until
// the next call into the library on this thread.
const char *fibrgf_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void fibrgf_string_free(char *s);

// Library version, statically allocated.
const char *fibrgf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIBRGF_H */
