#ifndef TREND_H
#define TREND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Version of this interface; bumped on incompatible changes.
 */
#define TREND_ABI_VERSION 1

/**
 * Keyword family used for transition labels.
 */
typedef enum TrendKeywordStyle {
  TREND_KEYWORD_STYLE_CHG_EXT = 0,
  TREND_KEYWORD_STYLE_DEV_DEX = 1,
} TrendKeywordStyle;

typedef enum TrendStatus {
  TREND_STATUS_OK = 0,
  TREND_STATUS_NULL_POINTER = 1,
  TREND_STATUS_INVALID_UTF8 = 2,
  TREND_STATUS_PARSE_ERROR = 3,
  TREND_STATUS_INVALID_STATE = 4,
  TREND_STATUS_NOT_FOUND = 5,
  TREND_STATUS_INVALID_ARGUMENT = 6,
  TREND_STATUS_PANIC = 7,
} TrendStatus;

/**
 * Opaque schema handle.
 */
typedef struct TrendSchema TrendSchema;

/**
 * Search limits for the reasoning calls; every field must be at least 1.
 */
typedef struct TrendBounds {
  uint32_t max_objects;
  uint32_t max_horizon;
  uint32_t max_values;
} TrendBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t trend_abi_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *trend_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void trend_string_free(char *s);

/**
 * Parses and validates schema text. On `PARSE_ERROR` the message lists
 * every diagnostic, one per line.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum TrendStatus trend_schema_parse(const char *src, struct TrendSchema **out);

/**
 * # Safety
 * `schema` must be null or a handle from [`trend_schema_parse`], not yet
 * freed.
 */
void trend_schema_free(struct TrendSchema *schema);

/**
 * Canonical text of the schema.
 *
 * # Safety
 * `schema` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_schema_format(const struct TrendSchema *schema,
                                     uint32_t keyword_style,
                                     char **out);

/**
 * DLR_US axioms, one per line.
 *
 * # Safety
 * `schema` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_schema_to_dlr(const struct TrendSchema *schema, char **out);

/**
 * Controlled-English sentences, one per line.
 *
 * # Safety
 * `schema` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_schema_verbalize(const struct TrendSchema *schema,
                                        uint32_t keyword_style,
                                        char **out);

/**
 * DOT diagram.
 *
 * # Safety
 * `schema` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_schema_to_dot(const struct TrendSchema *schema,
                                     uint32_t keyword_style,
                                     bool ascii,
                                     char **out);

/**
 * Checks a JSON state. `violation_count` receives the number of violations;
 * `out_json`, if not null, receives them as a JSON array.
 *
 * # Safety
 * `schema` must be a live handle, `state_json` a NUL-terminated string and
 * `violation_count` writable.
 */
enum TrendStatus trend_state_check(const struct TrendSchema *schema,
                                   const char *state_json,
                                   size_t *violation_count,
                                   char **out_json);

/**
 * Whether `element` is populated in some legal state within `bounds` (null
 * for the defaults). `out_json`, if not null, receives the verdict with
 * the witness.
 *
 * # Safety
 * `schema` must be a live handle, `element` a NUL-terminated string,
 * `bounds` null or readable, `holds` writable.
 */
enum TrendStatus trend_sat(const struct TrendSchema *schema,
                           const char *element,
                           const struct TrendBounds *bounds,
                           bool *holds,
                           char **out_json);

/**
 * Whether `sub` is contained in `sup` in every legal state within bounds.
 *
 * # Safety
 * As for [`trend_sat`].
 */
enum TrendStatus trend_subsume(const struct TrendSchema *schema,
                               const char *sub,
                               const char *sup,
                               const struct TrendBounds *bounds,
                               bool *holds,
                               char **out_json);

/**
 * Whether every legal state within bounds satisfies one more statement.
 *
 * # Safety
 * As for [`trend_sat`].
 */
enum TrendStatus trend_implies(const struct TrendSchema *schema,
                               const char *constraint,
                               const struct TrendBounds *bounds,
                               bool *holds,
                               char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TREND_H */
