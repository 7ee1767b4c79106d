#ifndef SPARSEMAPS_H
#define SPARSEMAPS_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmMode {
  SM_MODE_EXACT = 0,
  SM_MODE_APPROXIMATE = 1,
} SmMode;

/**
 * Status codes returned by every fallible function.
 */
typedef enum SmStatus {
  SM_OK = 0,
  SM_ERR_NULL = 1,
  SM_ERR_INVALID = 2,
  SM_ERR_DOMAIN = 3,
  SM_ERR_UNSUPPORTED = 4,
  SM_ERR_BUFFER_TOO_SMALL = 5,
  SM_ERR_IO = 6,
  SM_ERR_PANIC = 7,
} SmStatus;

/**
 * Opaque rooted map.
 */
typedef struct SmMap SmMap;

/**
 * Opaque sampler for one `(n, faces, genus)` class.
 */
typedef struct SmSampler SmSampler;

/**
 * Opaque defect table.
 */
typedef struct SmTable SmTable;

/**
 * Counts of the parts of a decomposition.
 */
typedef struct SmDecomposition {
  uintptr_t defect;
  uintptr_t core_edges;
  uintptr_t kernel_edges;
  uintptr_t first_tree_time;
} SmDecomposition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread.
 */
enum SmStatus sm_last_error(char *buf, uintptr_t len, uintptr_t *needed);

const char *sm_version(void);

/**
 * Builds a map from its edge involution `alpha`, vertex rotation `sigma`
 * (both of length `darts`) and root dart.
 */
enum SmStatus sm_map_new(const uint32_t *alpha,
                         const uint32_t *sigma,
                         uintptr_t darts,
                         uint32_t root,
                         struct SmMap **out);

void sm_map_free(struct SmMap *map);

/**
 * Edges, faces and genus of a map.
 */
enum SmStatus sm_map_signature(const struct SmMap *map,
                               uintptr_t *edges,
                               uintptr_t *faces,
                               uintptr_t *genus);

/**
 * Canonical code bytes; equal codes mean isomorphic rooted maps.
 */
enum SmStatus sm_map_canonical_code(const struct SmMap *map,
                                    uint8_t *buf,
                                    uintptr_t len,
                                    uintptr_t *needed);

/**
 * The map's dart permutations; each buffer must hold `2 * edges` entries.
 */
enum SmStatus sm_map_permutations(const struct SmMap *map,
                                  uint32_t *alpha,
                                  uint32_t *sigma,
                                  uintptr_t len,
                                  uint32_t *root);

enum SmStatus sm_map_decompose(const struct SmMap *map, struct SmDecomposition *out);

/**
 * Closed-form trivalent counts for every `s ≤ s_max`.
 */
enum SmStatus sm_table_closed_forms(uintptr_t s_max, struct SmTable **out);

/**
 * Loads a table file and merges it over the closed forms.
 */
enum SmStatus sm_table_load(const char *path, struct SmTable **out);

void sm_table_free(struct SmTable *table);

/**
 * Number of rooted maps. Writes its natural log to `ln_out` and, when the
 * value is exact, its decimal digits to `buf` (`needed` is 0 otherwise).
 */
enum SmStatus sm_count(uintptr_t n,
                       uintptr_t faces,
                       uintptr_t genus,
                       const struct SmTable *table,
                       double *ln_out,
                       char *buf,
                       uintptr_t len,
                       uintptr_t *needed);

/**
 * Sampler for maps with `n` edges, `faces` faces and genus `genus`. Trees,
 * one-face maps and cycle cores are supported; other classes need kernels
 * that only the CLI's oracle provides.
 */
enum SmStatus sm_sampler_new(uintptr_t n,
                             uintptr_t faces,
                             uintptr_t genus,
                             enum SmMode mode,
                             const struct SmTable *table,
                             struct SmSampler **out);

/**
 * One uniform map from the stream `(seed, replica)`.
 */
enum SmStatus sm_sampler_draw(const struct SmSampler *sampler,
                              uint64_t seed,
                              uint64_t replica,
                              struct SmMap **out);

void sm_sampler_free(struct SmSampler *sampler);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSEMAPS_H */
