#ifndef MCYCLE_H
#define MCYCLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MC_OK 0

#define MC_ERR_NULL_POINTER -1

#define MC_ERR_INVALID_UTF8 -2

#define MC_ERR_PANIC -3

#define MC_ERR_DEGENERATE_QUADRATIC 1

#define MC_ERR_INSUFFICIENT_PRECISION 2

#define MC_ERR_INCOMPATIBLE_RADICANDS 3

#define MC_ERR_LEAVES_QUADRATIC_CLOSURE 4

#define MC_ERR_DEGENERATE_CONFIGURATION 5

#define MC_ERR_LINE_ON_CONIC 6

#define MC_ERR_INVALID_MODULI 7

#define MC_ERR_CLOSED_FORM_MISMATCH 8

#define MC_ERR_NOT_ON_H4 9

#define MC_ERR_ON_H5_LOCUS 10

#define MC_ERR_NON_TRANSVERSAL 11

#define MC_ERR_ZERO_DENOMINATOR 12

#define MC_ERR_POLE_EVALUATION 13

#define MC_ERR_REPEATED_ROOT 14

#define MC_ERR_BRANCH_AT_RAMIFICATION 15

#define MC_ERR_INCOMPATIBLE_MODULES 16

#define MC_ERR_SINGULAR_ARGUMENT 17

#define MC_ERR_ON_SINGULAR_LOCUS 18

#define MC_ERR_BUDGET_EXCEEDED 19

#define MC_ERR_DIVISION_BY_ZERO 20

#define MC_ERR_PARSE 21

#define MC_ERR_INVALID_ARGUMENT 22

// Conic `p1 x² + p2 y² + p3 z² + p4 xy + p5 xz + p6 yz`.
typedef struct McConic McConic;

// Moduli point `(a1, a2, a3)`.
typedef struct McModuli McModuli;

// Output of the regulator pipeline.
typedef struct McRegulator McRegulator;

// A Green's function value with its tail estimate.
typedef struct McGreensValue {
  double value;
  // Truncation estimate.
  double tail;
  // Tail plus rounding radius.
  double error_budget;
  uint64_t terms_summed;
  uint64_t matrix_bound;
} McGreensValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null after a success.
// The pointer stays valid until the next library call on the same thread.
const char *mc_last_error_message(void);

// Library version as a static string.
const char *mc_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void mc_string_free(char *s);

// Creates a moduli point from three rationals written `p/q` or as decimals.
//
// # Safety
// The strings must be NUL-terminated and `out` writable.
int mc_moduli_new(const char *a1, const char *a2, const char *a3, struct McModuli **out);

// # Safety
// `p` must be null or a handle from [`mc_moduli_new`].
void mc_moduli_free(struct McModuli *p);

// Writes 1 to `out` when `a2 = a1 a3`, else 0.
//
// # Safety
// `p` must be a live handle and `out` writable.
int mc_moduli_on_h4(const struct McModuli *p, int *out);

// Writes 1 to `out` when the Δ = 5 conic is tangent to the line at infinity.
//
// # Safety
// `p` must be a live handle and `out` writable.
int mc_moduli_on_h5(const struct McModuli *p, int *out);

// The conic through q12, q23, q34, q45, q51.
//
// # Safety
// `p` must be a live handle and `out` writable.
int mc_humbert5_conic(const struct McModuli *p, struct McConic **out);

// # Safety
// `c` must be null or a handle from [`mc_humbert5_conic`].
void mc_conic_free(struct McConic *c);

// Writes the six coefficients as doubles. Coefficients with a
// radical part are written as their real value.
//
// # Safety
// `c` must be a live handle and `out` writable for six doubles.
int mc_conic_coeffs_f64(const struct McConic *c, double *out);

// Exact tangency test with the line `alpha x + beta y + gamma z = 0`.
//
// # Safety
// `c` must be a live handle, the strings NUL-terminated and `out` writable.
int mc_conic_is_tangent(const struct McConic *c,
                        const char *alpha,
                        const char *beta,
                        const char *gamma,
                        int *out);

// Exact JSON of the conic. Release the string with [`mc_string_free`].
//
// # Safety
// `c` must be a live handle and `out` writable.
int mc_conic_to_json(const struct McConic *c, char **out);

// Regulator pipeline at `(a1, a1 a3, a3)` with `precision` digits.
//
// # Safety
// The strings must be NUL-terminated and `out` writable.
int mc_regulator_h4(const char *a1,
                    const char *a3,
                    uint32_t precision,
                    int recognize,
                    struct McRegulator **out);

// # Safety
// `r` must be null or a regulator handle.
void mc_regulator_free(struct McRegulator *r);

// Result with the two sheets of the cover exchanged (ratio `1/R`).
//
// # Safety
// `r` must be a live handle and `out` writable.
int mc_regulator_conjugate_swap(const struct McRegulator *r, struct McRegulator **out);

// `log|R|` and the real and imaginary parts of `R` as doubles.
//
// # Safety
// `r` must be a live handle; the out pointers must be writable.
int mc_regulator_values(const struct McRegulator *r,
                        double *log_abs,
                        double *ratio_re,
                        double *ratio_im);

// Certified correct digits of the result.
//
// # Safety
// `r` must be a live handle and `out` writable.
int mc_regulator_digits(const struct McRegulator *r, uint32_t *out);

// `log|R|` as a decimal string with `sig_digits` significant digits.
//
// # Safety
// `r` must be a live handle and `out` writable.
int mc_regulator_log_abs_string(const struct McRegulator *r, uint32_t sig_digits, char **out);

// Lossless JSON of the full result.
//
// # Safety
// `r` must be a live handle and `out` writable.
int mc_regulator_to_json(const struct McRegulator *r, char **out);

// `G_k(z1, z2)` with entries of the enumerated matrices bounded by `bound`.
//
// # Safety
// `out` must be writable.
int mc_green_k(uint32_t k,
               double z1_re,
               double z1_im,
               double z2_re,
               double z2_im,
               uint64_t bound,
               struct McGreensValue *out);

// Hecke translate `G_s^m(z1, z2)`.
//
// # Safety
// `out` must be writable.
int mc_hecke_green(uint32_t s,
                   uint64_t m,
                   double z1_re,
                   double z1_im,
                   double z2_re,
                   double z2_im,
                   uint64_t bound,
                   struct McGreensValue *out);

// Runs a command-line invocation (`argv[0]` is the program name) and
// writes its JSON document to `out`. Returns the command's exit status
// (0, 1 or 2), or a negative status on interface misuse.
//
// # Safety
// `argv` must point to `argc` NUL-terminated strings and `out` be writable.
int mc_cli_run(int argc, const char *const *argv, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCYCLE_H */
