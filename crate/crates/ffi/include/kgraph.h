#ifndef KGRAPH_H
#define KGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum KgStatus {
  KG_STATUS_OK = 0,
  KG_STATUS_INVALID_INPUT = 1,
  KG_STATUS_UNSUPPORTED = 2,
  KG_STATUS_PARSE = 3,
  KG_STATUS_ASSERTION = 4,
  KG_STATUS_IO = 5,
  KG_STATUS_NULL_POINTER = 6,
  KG_STATUS_UTF8 = 7,
  KG_STATUS_PANIC = 8,
} KgStatus;

/**
 * Tag of a limit constant.
 */
typedef enum KgTheoryStatus {
  KG_THEORY_STATUS_THEOREM = 0,
  KG_THEORY_STATUS_CONJECTURE = 1,
  KG_THEORY_STATUS_OPEN = 2,
} KgTheoryStatus;

/**
 * Opaque classification record of one graph.
 */
typedef struct KgInvariant KgInvariant;

/**
 * Opaque adjacency matrix.
 */
typedef struct KgMatrix KgMatrix;

/**
 * Predicate flags of a [`KgInvariant`]; each field is 0 or 1.
 */
typedef struct KgPredicates {
  uint8_t strongly_connected;
  uint8_t has_sink;
  uint8_t k0_cyclic;
  uint8_t stably_cuntz_polygon;
  uint8_t stably_cuntz_algebra;
  uint8_t exactly_cuntz_polygon;
  uint8_t exactly_cuntz_algebra;
  uint8_t flow_equiv_full_shift;
} KgPredicates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on this thread.
 */
const char *kg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *kg_version(void);

/**
 * Builds an `n × n` adjacency matrix from `n²` row-major entries.
 *
 * # Safety
 * `entries` must point to `n * n` readable values; `out` must be writable.
 */
enum KgStatus kg_matrix_new(size_t n, const uint32_t *entries, struct KgMatrix **out);

/**
 * Parses a matrix in the text format: a `rows cols` header, then one row
 * per line.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum KgStatus kg_matrix_parse(const char *text, struct KgMatrix **out);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t kg_matrix_size(const struct KgMatrix *m);

/**
 * # Safety
 * `m` must be null or a handle from this library, not yet freed.
 */
void kg_matrix_free(struct KgMatrix *m);

/**
 * Classifies the graph of `m`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_invariant_compute(const struct KgMatrix *m, struct KgInvariant **out);

/**
 * # Safety
 * `inv` must be null or a handle from this library, not yet freed.
 */
void kg_invariant_free(struct KgInvariant *inv);

/**
 * Rank of K₁.
 *
 * # Safety
 * `inv` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_invariant_k1_rank(const struct KgInvariant *inv, size_t *out);

/**
 * Sign of `det(I − A)`: −1, 0 or 1.
 *
 * # Safety
 * `inv` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_invariant_det_sign(const struct KgInvariant *inv, int32_t *out);

/**
 * Predicate flags.
 *
 * # Safety
 * `inv` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_invariant_predicates(const struct KgInvariant *inv, struct KgPredicates *out);

/**
 * Full record as JSON; release with [`kg_string_free`].
 *
 * # Safety
 * `inv` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_invariant_to_json(const struct KgInvariant *inv, char **out);

/**
 * Looks up a named limit constant. `p` and `r` are ignored when 0.
 *
 * # Safety
 * `name` must be a nul-terminated string; `value` and `status` writable.
 */
enum KgStatus kg_theory_constant(const char *name,
                                 uint64_t p,
                                 uint64_t r,
                                 double *value,
                                 enum KgTheoryStatus *status);

/**
 * Runs a simulation described by a run-config JSON object and returns the
 * summary JSON; release with [`kg_string_free`].
 *
 * # Safety
 * `config_json` must be a nul-terminated string; `out` must be writable.
 */
enum KgStatus kg_simulate_json(const char *config_json, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void kg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGRAPH_H */
