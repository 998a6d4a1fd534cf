#ifndef PDA_WORKBENCH_H
#define PDA_WORKBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdaStatus {
  PDA_STATUS_OK = 0,
  PDA_STATUS_INVALID_ARGUMENT = 1,
  PDA_STATUS_PARSE_ERROR = 2,
  PDA_STATUS_MALFORMED = 3,
  PDA_STATUS_VERIFICATION_FAILED = 4,
  PDA_STATUS_BUDGET_EXCEEDED = 5,
  PDA_STATUS_NULL_POINTER = 6,
  PDA_STATUS_INTERNAL = 7,
} PdaStatus;

/**
 * A PDA owned by the library. Free with `pda_free`.
 */
typedef struct PdaHandle PdaHandle;

typedef struct PdaParams {
  size_t users;
  size_t rows;
  size_t stars;
  size_t symbols;
} PdaParams;

typedef struct PdaBound {
  uint64_t value;
  /**
   * Reduced `value / F`.
   */
  uint64_t rate_num;
  uint64_t rate_den;
  bool exact;
} PdaBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *pda_last_error(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PdaStatus pda_construct_partition(size_t q, size_t m, struct PdaHandle **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PdaStatus pda_construct_bipartite(size_t m, size_t a, size_t b, struct PdaHandle **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PdaStatus pda_construct_grouping(size_t m,
                                      size_t a,
                                      size_t b,
                                      size_t h,
                                      struct PdaHandle **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum PdaStatus pda_construct_mn(size_t users, size_t t, struct PdaHandle **out);

/**
 * Parses the `PDA F K` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum PdaStatus pda_parse(const char *text, struct PdaHandle **out);

/**
 * # Safety
 * `handle` must be NULL or come from this library and not be freed yet.
 */
void pda_free(struct PdaHandle *handle);

/**
 * `(K, F, Z, S)`. Fails with `MALFORMED` when columns disagree on `Z`.
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writes.
 */
enum PdaStatus pda_params(const struct PdaHandle *handle, struct PdaParams *out);

/**
 * Returns `OK` for a valid PDA and `VERIFICATION_FAILED` otherwise, with
 * the first violation as the error message.
 *
 * # Safety
 * `handle` must be a live handle.
 */
enum PdaStatus pda_verify(const struct PdaHandle *handle);

/**
 * Renders the grid in the `PDA F K` format. Release with `pda_string_free`.
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writes.
 */
enum PdaStatus pda_to_text(const struct PdaHandle *handle, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void pda_string_free(char *s);

/**
 * Exact ordering bound of the handle's star pattern. When the node budget
 * or `max_users` is exceeded the greedy value is written and
 * `BUDGET_EXCEEDED` returned. `witness` (1-based users) may be NULL.
 *
 * # Safety
 * `handle` must be live, `out` valid for writes, and `witness` NULL or
 * valid for `witness_len` writes.
 */
enum PdaStatus pda_bound_exact(const struct PdaHandle *handle,
                               size_t max_users,
                               uint64_t node_budget,
                               struct PdaBound *out,
                               size_t *witness,
                               size_t witness_len);

/**
 * # Safety
 * As for `pda_bound_exact`.
 */
enum PdaStatus pda_bound_greedy(const struct PdaHandle *handle,
                                struct PdaBound *out,
                                size_t *witness,
                                size_t witness_len);

/**
 * Delivers and decodes one demand (`K` 1-based file indices, or NULL for
 * every one of the `files^K` demands) on seeded random files. Writes the
 * worst-case signal count; returns `VERIFICATION_FAILED` if any user fails
 * to recover its file.
 *
 * # Safety
 * `handle` must be live, `demand` NULL or valid for `K` reads, and
 * `signals` valid for writes.
 */
enum PdaStatus pda_simulate(const struct PdaHandle *handle,
                            size_t files,
                            const size_t *demand,
                            size_t packet_len,
                            uint64_t seed,
                            size_t *signals);

/**
 * Min over placements with `K` users, `F` rows and `Z` stars per column of
 * the exact ordering bound, with isomorphic placements skipped. Returns
 * `BUDGET_EXCEEDED` (with the best value found) when the search was cut
 * short.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PdaStatus pda_search(size_t users,
                          size_t rows,
                          size_t stars,
                          uint64_t placement_budget,
                          struct PdaBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDA_WORKBENCH_H */
