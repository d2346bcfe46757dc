#ifndef BNX_H
#define BNX_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BnxStatus {
  BNX_STATUS_OK = 0,
  BNX_STATUS_IO = 1,
  BNX_STATUS_INVALID_ARGUMENT = 2,
  BNX_STATUS_PARSE = 3,
  BNX_STATUS_CAPACITY = 4,
  BNX_STATUS_VERIFICATION = 5,
  BNX_STATUS_CONTRACT = 6,
  BNX_STATUS_NULL_POINTER = 7,
  BNX_STATUS_INVALID_UTF8 = 8,
  BNX_STATUS_INTERNAL = 9,
} BnxStatus;

/**
 * Explanation kinds for [`bnx_explain`].
 */
typedef enum BnxExplainKind {
  /**
   * Minimum-cardinality explanations.
   */
  BNX_EXPLAIN_KIND_MC = 0,
  /**
   * All prime-implicant explanations.
   */
  BNX_EXPLAIN_KIND_PI = 1,
  /**
   * Shortest prime-implicant explanations only.
   */
  BNX_EXPLAIN_KIND_PI_SHORTEST = 2,
} BnxExplainKind;

/**
 * A loaded classifier.
 */
typedef struct BnxClassifier BnxClassifier;

/**
 * A set of explanations rendered as text, one string per explanation.
 */
typedef struct BnxExplanation BnxExplanation;

/**
 * A decision diagram together with the classifier feature order it was
 * compiled with (identity when loaded from a file).
 */
typedef struct BnxOdd BnxOdd;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. Valid until
 * the next failing call on the same thread; do not free.
 */
const char *bnx_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bnx_string_free(char *s);

/**
 * Load a classifier file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BnxStatus bnx_classifier_load(const char *path, struct BnxClassifier **out);

/**
 * Parse a classifier from text in the classifier file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BnxStatus bnx_classifier_parse(const char *text, struct BnxClassifier **out);

/**
 * # Safety
 * `c` must come from this library and not be freed twice. NULL is ignored.
 */
void bnx_classifier_free(struct BnxClassifier *c);

/**
 * Number of features.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_classifier_num_features(const struct BnxClassifier *c, size_t *out);

/**
 * Posterior of the positive class for feature values in declaration order.
 *
 * # Safety
 * `c` must be a live handle; `values` must point to `len` entries; `out`
 * must be writable.
 */
enum BnxStatus bnx_classifier_posterior(const struct BnxClassifier *c,
                                        const size_t *values,
                                        size_t len,
                                        double *out);

/**
 * Decision (1 positive, 0 negative) for feature values in declaration order.
 *
 * # Safety
 * As for [`bnx_classifier_posterior`].
 */
enum BnxStatus bnx_classifier_decide(const struct BnxClassifier *c,
                                     const size_t *values,
                                     size_t len,
                                     int *out);

/**
 * Compile a classifier. `order` lists feature indices top to bottom; pass
 * NULL/0 for the default order (required for latent trees).
 *
 * # Safety
 * `c` must be a live handle; `order` must point to `order_len` entries when
 * non-NULL; `out` must be writable.
 */
enum BnxStatus bnx_compile(const struct BnxClassifier *c,
                           const size_t *order,
                           size_t order_len,
                           struct BnxOdd **out);

/**
 * Load a diagram file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BnxStatus bnx_odd_load(const char *path, struct BnxOdd **out);

/**
 * Parse a diagram from text in the diagram file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BnxStatus bnx_odd_parse(const char *text, struct BnxOdd **out);

/**
 * # Safety
 * `odd` must come from this library and not be freed twice. NULL is ignored.
 */
void bnx_odd_free(struct BnxOdd *odd);

/**
 * Write a diagram file.
 *
 * # Safety
 * `odd` must be a live handle; `path` must be a NUL-terminated string.
 */
enum BnxStatus bnx_odd_save(const struct BnxOdd *odd, const char *path);

/**
 * Diagram file text (`dot` = 0) or Graphviz text (`dot` ≠ 0). Free with
 * [`bnx_string_free`].
 *
 * # Safety
 * `odd` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_odd_to_string(const struct BnxOdd *odd, int dot, char **out);

/**
 * Number of variables (diagram levels).
 *
 * # Safety
 * `odd` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_odd_num_vars(const struct BnxOdd *odd, size_t *out);

/**
 * Classifier feature index tested at each level; writes `num_vars` entries.
 *
 * # Safety
 * `odd` must be a live handle; `out` must have room for `num_vars` entries.
 */
enum BnxStatus bnx_odd_order(const struct BnxOdd *odd, size_t *out);

/**
 * Number of internal nodes.
 *
 * # Safety
 * `odd` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_odd_size(const struct BnxOdd *odd, size_t *out);

/**
 * Number of positive instances, in decimal. Free with [`bnx_string_free`].
 *
 * # Safety
 * `odd` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_odd_model_count(const struct BnxOdd *odd, char **out);

/**
 * Decision for values given in diagram level order.
 *
 * # Safety
 * `odd` must be a live handle; `values` must point to `len` entries; `out`
 * must be writable.
 */
enum BnxStatus bnx_odd_evaluate(const struct BnxOdd *odd,
                                const size_t *values,
                                size_t len,
                                int *out);

/**
 * Whether the decision function is monotone (1) or not (0).
 *
 * # Safety
 * `odd` must be a live handle; `out` must be writable.
 */
enum BnxStatus bnx_odd_is_monotone(struct BnxOdd *odd, int *out);

/**
 * Explain the decision on an instance given in diagram level order.
 *
 * # Safety
 * `odd` must be a live handle; `values` must point to `len` entries; `out`
 * must be writable.
 */
enum BnxStatus bnx_explain(struct BnxOdd *odd,
                           const size_t *values,
                           size_t len,
                           enum BnxExplainKind kind,
                           struct BnxExplanation **out);

/**
 * # Safety
 * `e` must come from this library and not be freed twice. NULL is ignored.
 */
void bnx_explanation_free(struct BnxExplanation *e);

/**
 * Decision being explained: 1 positive, 0 negative, -1 for a NULL handle.
 *
 * # Safety
 * `e` must be a live handle or NULL.
 */
int bnx_explanation_decision(const struct BnxExplanation *e);

/**
 * Number of explanations held (0 for a NULL handle).
 *
 * # Safety
 * `e` must be a live handle or NULL.
 */
size_t bnx_explanation_len(const struct BnxExplanation *e);

/**
 * Number of explanations in decimal (may exceed `size_t`). Owned by the
 * handle; do not free.
 *
 * # Safety
 * `e` must be a live handle or NULL.
 */
const char *bnx_explanation_count(const struct BnxExplanation *e);

/**
 * Explanation `i` as space-separated value labels, `*` for free features.
 * Owned by the handle; NULL when out of range.
 *
 * # Safety
 * `e` must be a live handle or NULL.
 */
const char *bnx_explanation_get(const struct BnxExplanation *e, size_t i);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BNX_H */
