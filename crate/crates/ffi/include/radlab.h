#ifndef RADLAB_H
#define RADLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RadlabStatus {
  RADLAB_STATUS_OK = 0,
  RADLAB_STATUS_NULL_POINTER = 1,
  RADLAB_STATUS_INVALID_UTF8 = 2,
  RADLAB_STATUS_PARSE = 3,
  RADLAB_STATUS_NOT_A_COLOUR = 4,
  RADLAB_STATUS_BUDGET = 5,
  RADLAB_STATUS_SCHEMA = 6,
  RADLAB_STATUS_BASIS_MISMATCH = 7,
  RADLAB_STATUS_NO_WITNESS = 8,
  RADLAB_STATUS_PRECONDITION = 9,
  RADLAB_STATUS_NO_CONVERGENCE = 10,
  RADLAB_STATUS_INTERNAL = 11,
} RadlabStatus;

/**
 * A truncated basis of all words up to a fixed length.
 */
typedef struct RadlabBasis RadlabBasis;

/**
 * A finite linear combination of colour sequences.
 */
typedef struct RadlabElement RadlabElement;

/**
 * A sparse operator on a truncated basis.
 */
typedef struct RadlabOperator RadlabOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into a new string, or
 * returns null if there was none.
 */
char *radlab_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void radlab_string_free(char *s);

/**
 * Writes the colour `μ(word)` as a new string.
 *
 * # Safety
 * `word` must be a NUL-terminated string; `out` must be writable.
 */
enum RadlabStatus radlab_colour_map(const char *word, char **out);

/**
 * `log2` of the depth weight and of the path weight of `word`.
 *
 * # Safety
 * `word` must be a NUL-terminated string; the outputs must be writable.
 */
enum RadlabStatus radlab_word_weights(const char *word,
                                      int64_t *weight_log2,
                                      int64_t *path_weight_log2);

/**
 * # Safety
 * `out` must be writable.
 */
enum RadlabStatus radlab_basis_new(size_t max_len, struct RadlabBasis **out);

/**
 * Number of words in the basis; 0 for a null handle.
 *
 * # Safety
 * `basis` must be null or a live handle.
 */
size_t radlab_basis_dimension(const struct RadlabBasis *basis);

/**
 * # Safety
 * `basis` must be null or a live handle, which is invalid afterwards.
 */
void radlab_basis_free(struct RadlabBasis *basis);

/**
 * Parses `{"terms": [{"coeff": [re, im], "colours": [...]}, ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RadlabStatus radlab_element_from_json(const char *json, struct RadlabElement **out);

/**
 * # Safety
 * `element` must be a live handle; `out` must be writable.
 */
enum RadlabStatus radlab_element_to_json(const struct RadlabElement *element, char **out);

/**
 * # Safety
 * `element` must be null or a live handle, which is invalid afterwards.
 */
void radlab_element_free(struct RadlabElement *element);

/**
 * The operator of `element` on `basis`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum RadlabStatus radlab_realize(const struct RadlabElement *element,
                                 const struct RadlabBasis *basis,
                                 struct RadlabOperator **out);

/**
 * `a · b`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum RadlabStatus radlab_operator_compose(const struct RadlabOperator *a,
                                          const struct RadlabOperator *b,
                                          struct RadlabOperator **out);

/**
 * Largest singular value to relative accuracy `tol`.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum RadlabStatus radlab_operator_norm(const struct RadlabOperator *op, double tol, double *out);

/**
 * The entry `<T e_col, e_row>`.
 *
 * # Safety
 * `op` must be a live handle; the words must be NUL-terminated; the
 * outputs must be writable.
 */
enum RadlabStatus radlab_operator_entry(const struct RadlabOperator *op,
                                        const char *row,
                                        const char *col,
                                        double *re,
                                        double *im);

/**
 * Serializes as `{"max_len": L, "entries": [[row, col, re, im], ...]}`.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum RadlabStatus radlab_operator_to_json(const struct RadlabOperator *op, char **out);

/**
 * # Safety
 * `op` must be null or a live handle, which is invalid afterwards.
 */
void radlab_operator_free(struct RadlabOperator *op);

/**
 * Coefficient of the comma-separated colour sequence in `op`.
 *
 * # Safety
 * `op` must be a live handle; `colours` must be NUL-terminated; the
 * outputs must be writable.
 */
enum RadlabStatus radlab_lambda_extract(const struct RadlabOperator *op,
                                        const char *colours,
                                        double *re,
                                        double *im);

/**
 * First word whose colour trace is the comma-separated sequence, or an
 * empty string if none has length `<= max_len`.
 *
 * # Safety
 * `colours` must be NUL-terminated; `out` must be writable.
 */
enum RadlabStatus radlab_support_test(const char *colours, size_t max_len, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADLAB_H */
