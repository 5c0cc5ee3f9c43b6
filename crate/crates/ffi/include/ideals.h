#ifndef IDEALS_H
#define IDEALS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IdealsStatus {
  IDEALS_STATUS_OK = 0,
  IDEALS_STATUS_NULL_ARGUMENT = 1,
  IDEALS_STATUS_INVALID_UTF8 = 2,
  IDEALS_STATUS_SCHEMA = 3,
  IDEALS_STATUS_UNDECIDABLE = 4,
  IDEALS_STATUS_NOT_CONVERGENT = 5,
  IDEALS_STATUS_PRECONDITION = 6,
  IDEALS_STATUS_CHECK_FAILED = 7,
  IDEALS_STATUS_PANIC = 8,
} IdealsStatus;

/**
 * Opaque sequence handle.
 */
typedef struct IdealsSequence IdealsSequence;

/**
 * Opaque set handle.
 */
typedef struct IdealsSet IdealsSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message behind the last failing call on this thread, or null. Valid
 * until the next call into the library on the same thread.
 */
const char *ideals_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, freed at most once.
 */
void ideals_string_free(char *s);

/**
 * Parses a set from JSON (`{"kind": ...}`).
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum IdealsStatus ideals_set_from_json(const char *json, struct IdealsSet **out);

/**
 * # Safety
 * `s` is null or a handle from [`ideals_set_from_json`], freed at most once.
 */
void ideals_set_free(struct IdealsSet *s);

/**
 * # Safety
 * `s` is a live set handle; `out` is writable.
 */
enum IdealsStatus ideals_set_contains(const struct IdealsSet *s, uint64_t n, bool *out);

/**
 * `|S ∩ [1, n]|`.
 *
 * # Safety
 * `s` is a live set handle; `out` is writable.
 */
enum IdealsStatus ideals_set_count(const struct IdealsSet *s, uint64_t n, uint64_t *out);

/**
 * Density report as JSON: `{"value", "exact": true}` or `{"lo", "hi", "exact": false, "window"}`.
 * `functional` is one of `d*`, `d_*`, `log`, `alpha:<q>`, `polya`; a zero
 * budget selects the default.
 *
 * # Safety
 * `s` is a live set handle; `functional` a nul-terminated string; `out` writable.
 */
enum IdealsStatus ideals_set_density(const struct IdealsSet *s,
                                     const char *functional,
                                     uint64_t budget,
                                     char **out);

/**
 * # Safety
 * `s` is a live set handle; `ideal_name` a nul-terminated string; `out` writable.
 */
enum IdealsStatus ideals_set_member(const struct IdealsSet *s, const char *ideal_name, bool *out);

/**
 * Parses a sequence from JSON (`{"pieces": [...]}`).
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum IdealsStatus ideals_seq_from_json(const char *json, struct IdealsSequence **out);

/**
 * # Safety
 * `x` is null or a handle from [`ideals_seq_from_json`], freed at most once.
 */
void ideals_seq_free(struct IdealsSequence *x);

/**
 * `x_n` as a `"p/q"` string.
 *
 * # Safety
 * `x` is a live sequence handle; `out` is writable.
 */
enum IdealsStatus ideals_seq_eval(const struct IdealsSequence *x, uint64_t n, char **out);

/**
 * The ideal limit as a `"p/q"` string; `NotConvergent` when there is none.
 *
 * # Safety
 * `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
 */
enum IdealsStatus ideals_seq_limit(const struct IdealsSequence *x,
                                   const char *ideal_name,
                                   char **out);

/**
 * `{"gamma": [...], "lambda": [...], "divergent": null | {"support", "inIdeal"}}`.
 *
 * # Safety
 * `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
 */
enum IdealsStatus ideals_seq_cluster(const struct IdealsSequence *x,
                                     const char *ideal_name,
                                     char **out);

/**
 * `x = y + z` against the ideal limit: `{"limit", "y", "z", "zSupport"}`.
 *
 * # Safety
 * `x` is a live sequence handle; `ideal_name` a nul-terminated string; `out` writable.
 */
enum IdealsStatus ideals_seq_decompose(const struct IdealsSequence *x,
                                       const char *ideal_name,
                                       char **out);

/**
 * Runs one catalog check or negative control. `trials == 0` selects the
 * default. The verdict JSON is written to `out` whether or not it passes;
 * a failing check returns `CheckFailed`.
 *
 * # Safety
 * `id` is a nul-terminated string; `out` is writable.
 */
enum IdealsStatus ideals_check(const char *id, uint64_t trials, uint64_t seed, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* IDEALS_H */
