#ifndef POLYFORM_H
#define POLYFORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum PfStatus {
  PF_OK = 0,
  PF_NULL_POINTER = 1,
  PF_INVALID_GONALITY = 2,
  PF_ARITHMETIC_RANGE = 3,
  PF_CONTRACT = 4,
  PF_BOUND_TOO_LARGE = 5,
  PF_TRUNCATED = 6,
  PF_CACHE_FORMAT = 7,
  PF_CACHE_VERSION = 8,
  PF_IO = 9,
  PF_PARSE = 10,
  PF_PANIC = 11,
} PfStatus;

/**
 * Representability table for one form.
 */
typedef struct PfTable PfTable;

/**
 * Aggregate statistics of one escalator tree.
 */
typedef struct PfTreeReport PfTreeReport;

/**
 * Flat copy of a tree report; rank fields are 0 when there are no leaves.
 */
typedef struct PfTreeSummary {
  uint32_t m;
  uint64_t bound;
  uint64_t gamma_b;
  uint32_t min_leaf_rank;
  uint32_t max_leaf_rank;
  uint64_t node_count;
  uint64_t leaf_count;
  bool truncated;
} PfTreeSummary;

/**
 * Message of the last failure on this thread, or null. Owned by the library.
 */
const char *pf_last_error(void);

/**
 * Library version, static storage.
 */
const char *pf_version(void);

/**
 * `*out_value = P_m(x)`.
 *
 * # Safety
 * `out_value` must be valid for writes.
 */
enum PfStatus pf_eval_polygonal(uint32_t m, int64_t x, uint64_t *out_value);

/**
 * Builds the table of `sum coeffs[i] P_m(x_i)` over `[0, bound]`.
 *
 * # Safety
 * `coeffs` must point to `n` readable values (or be null with `n == 0`);
 * `out_table` must be valid for writes.
 */
enum PfStatus pf_table_build(uint32_t m,
                             const uint64_t *coeffs,
                             size_t n,
                             uint64_t bound,
                             struct PfTable **out_table);

/**
 * New table for `parent` with coefficient `a` appended.
 *
 * # Safety
 * `parent` must be a live table; `out_table` must be valid for writes.
 */
enum PfStatus pf_table_extend(const struct PfTable *parent, uint64_t a, struct PfTable **out_table);

/**
 * # Safety
 * `table` must be a live table; `out_flag` must be valid for writes.
 */
enum PfStatus pf_table_represents(const struct PfTable *table, uint64_t n, bool *out_flag);

/**
 * Truant in `[1, B]`; `*out_universal` is set and `*out_truant` is 0 when none.
 *
 * # Safety
 * `table` must be a live table; both outputs must be valid for writes.
 */
enum PfStatus pf_table_truant(const struct PfTable *table,
                              uint64_t *out_truant,
                              bool *out_universal);

/**
 * # Safety
 * `table` must be a live table; `out_bound` must be valid for writes.
 */
enum PfStatus pf_table_bound(const struct PfTable *table, uint64_t *out_bound);

/**
 * Writes the table in the binary cache format.
 *
 * # Safety
 * `table` must be a live table; `path` a NUL-terminated UTF-8 string.
 */
enum PfStatus pf_table_save(const struct PfTable *table, const char *path);

/**
 * Reads a table written by [`pf_table_save`] or the CLI cache.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out_table` valid for writes.
 */
enum PfStatus pf_table_load(const char *path, struct PfTable **out_table);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards. Null is ignored.
 */
void pf_table_free(struct PfTable *table);

/**
 * Builds the escalator tree; a `node_budget` of 0 uses the default.
 *
 * # Safety
 * `out_report` must be valid for writes.
 */
enum PfStatus pf_tree_build(uint32_t m,
                            uint64_t bound,
                            uint64_t node_budget,
                            struct PfTreeReport **out_report);

/**
 * # Safety
 * `report` must be a live report; `out_summary` valid for writes.
 */
enum PfStatus pf_tree_summary(const struct PfTreeReport *report, struct PfTreeSummary *out_summary);

/**
 * Number of leaves of the given rank.
 *
 * # Safety
 * `report` must be a live report; `out_count` valid for writes.
 */
enum PfStatus pf_tree_leaves_of_rank(const struct PfTreeReport *report,
                                     uint32_t rank,
                                     uint64_t *out_count);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards. Null is ignored.
 */
void pf_tree_report_free(struct PfTreeReport *report);

#endif  /* POLYFORM_H */
