#ifndef GATECOMM_H
#define GATECOMM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum gc_status {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_ARGUMENT = 1,
  GC_STATUS_INVALID_UTF8 = 2,
  GC_STATUS_DOMAIN = 3,
  GC_STATUS_LAYOUT = 4,
  GC_STATUS_CONTRACT = 5,
  GC_STATUS_SIZE = 6,
  GC_STATUS_REVERSE_UNDEFINED = 7,
  GC_STATUS_PARSE = 8,
  GC_STATUS_UNKNOWN_NAME = 9,
  GC_STATUS_JSON = 10,
  GC_STATUS_PANIC = 99,
} gc_status;

/**
 * Opaque resource expression.
 */
typedef struct gc_expr gc_expr;

/**
 * Opaque pure state.
 */
typedef struct gc_state gc_state;

/**
 * Point of a capacity region: forward, backward and entanglement rates.
 */
typedef struct gc_triple {
  double c1;
  double c2;
  double e;
} gc_triple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Owned by the
 * library and valid until the next call on the same thread.
 */
const char *gc_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void gc_string_free(char *s);

/**
 * Parses a resource expression such as `2[q->qq] - [qq]`.
 *
 * # Safety
 * `src` is a NUL-terminated string; `out` is writable.
 */
enum gc_status gc_expr_parse(const char *src, struct gc_expr **out);

/**
 * # Safety
 * `e` is NULL or a handle from this library and not yet freed.
 */
void gc_expr_free(struct gc_expr *e);

/**
 * Canonical form: cobits and cocobits rewritten into qubits and ebits.
 *
 * # Safety
 * `e` is a live handle; `out` is writable.
 */
enum gc_status gc_expr_canonicalize(const struct gc_expr *e, struct gc_expr **out);

/**
 * Swaps the roles of the two parties.
 *
 * # Safety
 * `e` is a live handle; `out` is writable.
 */
enum gc_status gc_expr_exchange(const struct gc_expr *e, struct gc_expr **out);

/**
 * Time reversal. Fails with `GC_STATUS_REVERSE_UNDEFINED` on cbits.
 *
 * # Safety
 * `e` is a live handle; `out` is writable.
 */
enum gc_status gc_expr_reverse(const struct gc_expr *e, struct gc_expr **out);

/**
 * Writes whether `a` and `b` are equal after canonicalization.
 *
 * # Safety
 * `a` and `b` are live handles; `out` is writable.
 */
enum gc_status gc_expr_equal(const struct gc_expr *a, const struct gc_expr *b, bool *out);

/**
 * Text form of an expression; free with [`gc_string_free`].
 *
 * # Safety
 * `e` is a live handle; `out` is writable.
 */
enum gc_status gc_expr_to_string(const struct gc_expr *e, char **out);

/**
 * Builds a state from `{"wires": [...], "amplitudes": [[re, im], ...]}`.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
enum gc_status gc_state_from_json(const char *json, struct gc_state **out);

/**
 * # Safety
 * `s` is NULL or a handle from this library and not yet freed.
 */
void gc_state_free(struct gc_state *s);

/**
 * Applies a registered gate (e.g. `v_m:2`) to the named wires in place.
 *
 * # Safety
 * `s` is a live handle; `gate` is a NUL-terminated string; `targets`
 * points to `n_targets` NUL-terminated strings.
 */
enum gc_status gc_state_apply_gate(struct gc_state *s,
                                   const char *gate,
                                   const char *const *targets,
                                   size_t n_targets);

/**
 * Total dimension of the register.
 *
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum gc_status gc_state_dim(const struct gc_state *s, size_t *out);

/**
 * Amplitude at a big-endian basis index.
 *
 * # Safety
 * `s` is a live handle; `re` and `im` are writable.
 */
enum gc_status gc_state_amplitude(const struct gc_state *s, size_t index, double *re, double *im);

/**
 * Serializes a state in the format read by [`gc_state_from_json`].
 *
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum gc_status gc_state_to_json(const struct gc_state *s, char **out);

/**
 * Capacity-region point of the time-reversed protocol.
 *
 * # Safety
 * `out` is writable.
 */
enum gc_status gc_region_reverse(struct gc_triple t, struct gc_triple *out);

/**
 * Concentrates `n` copies of the state with Schmidt coefficients `probs`
 * and writes the report as JSON.
 *
 * # Safety
 * `probs` points to `len` doubles; `out` is writable.
 */
enum gc_status gc_concentrate(const double *probs, size_t len, size_t n, double delta, char **out);

/**
 * Runs a registered experiment and writes its JSON output.
 *
 * `params_json` is NULL or an object of parameter values, e.g.
 * `{"m": 2, "trials": 100}`; `seed` and `trials` are read from it too.
 *
 * # Safety
 * `name` is a NUL-terminated string; `params_json` is NULL or one;
 * `out` is writable.
 */
enum gc_status gc_run_experiment(const char *name, const char *params_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GATECOMM_H */
