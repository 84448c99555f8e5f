#ifndef XORSAT_H
#define XORSAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XorsatStatus {
  XORSAT_STATUS_OK = 0,
  XORSAT_STATUS_NULL_POINTER = 1,
  XORSAT_STATUS_INVALID_PARAMETERS = 2,
  XORSAT_STATUS_HAS_CORE = 3,
  XORSAT_STATUS_NO_CLUSTERS = 4,
  XORSAT_STATUS_TOO_LARGE = 5,
  XORSAT_STATUS_UNDEFINED = 6,
  XORSAT_STATUS_PARSE = 7,
  XORSAT_STATUS_IO = 8,
  XORSAT_STATUS_OUT_OF_RANGE = 9,
  XORSAT_STATUS_INTERNAL = 10,
} XorsatStatus;

/**
 * Opaque sparse kernel basis.
 */
typedef struct XorsatBasis XorsatBasis;

/**
 * Opaque factor graph.
 */
typedef struct XorsatGraph XorsatGraph;

typedef struct XorsatPeelSummary {
  bool peelable;
  size_t halting_time;
  size_t core_vars;
  size_t core_checks;
} XorsatPeelSummary;

typedef struct XorsatClusterSummary {
  size_t core_vars;
  size_t core_checks;
  size_t core_dim;
  size_t g_log2;
  size_t log2_clusters;
  double exponent;
} XorsatClusterSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *xorsat_last_error_message(void);

/**
 * Samples a uniform instance with `m` checks of width `k` on `n` variables.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum XorsatStatus xorsat_graph_generate(size_t n,
                                        size_t k,
                                        size_t m,
                                        uint64_t seed,
                                        struct XorsatGraph **out);

/**
 * Reads an instance file in the text format.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` valid for one write.
 */
enum XorsatStatus xorsat_graph_read(const char *path, struct XorsatGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library not yet freed.
 */
void xorsat_graph_free(struct XorsatGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t xorsat_graph_num_vars(const struct XorsatGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t xorsat_graph_num_checks(const struct XorsatGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle and `out` valid for one write.
 */
enum XorsatStatus xorsat_peel(const struct XorsatGraph *g, struct XorsatPeelSummary *out);

/**
 * Sparse kernel basis of a core-free graph; `HasCore` otherwise.
 *
 * # Safety
 * `g` must be a live graph handle and `out` valid for one write.
 */
enum XorsatStatus xorsat_basis_no_core(const struct XorsatGraph *g, struct XorsatBasis **out);

/**
 * # Safety
 * `b` must be null or a basis handle not yet freed.
 */
void xorsat_basis_free(struct XorsatBasis *b);

/**
 * # Safety
 * `b` must be a live basis handle.
 */
size_t xorsat_basis_dim(const struct XorsatBasis *b);

/**
 * Largest support size.
 *
 * # Safety
 * `b` must be a live basis handle.
 */
size_t xorsat_basis_sparsity(const struct XorsatBasis *b);

/**
 * Copies the sorted 0-indexed support of vector `i` into `buf` (capacity
 * `cap`) and stores its length in `len`. When `cap` is too small nothing
 * is copied but `len` is still set, so a first call with `cap = 0` sizes
 * the buffer.
 *
 * # Safety
 * `b` must be a live basis handle, `len` valid for one write and `buf`
 * valid for `cap` writes (or null when `cap` is 0).
 */
enum XorsatStatus xorsat_basis_vector(const struct XorsatBasis *b,
                                      size_t i,
                                      size_t *buf,
                                      size_t cap,
                                      size_t *len);

/**
 * Cluster count of a graph with a core. Zero for `weight_cutoff` or
 * `witness_depth` selects the size-dependent default.
 *
 * # Safety
 * `g` must be a live graph handle and `out` valid for one write.
 */
enum XorsatStatus xorsat_cluster_count(const struct XorsatGraph *g,
                                       size_t weight_cutoff,
                                       size_t witness_depth,
                                       struct XorsatClusterSummary *out);

/**
 * Clustering threshold α_d(k).
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum XorsatStatus xorsat_alpha_d(size_t k, double *out);

/**
 * Predicted cluster-count exponent; `NoClusters` below the threshold.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum XorsatStatus xorsat_sigma(double alpha, size_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XORSAT_H */
