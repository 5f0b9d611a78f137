#ifndef STORYREADER_H
#define STORYREADER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum sr_status {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_ARGUMENT = 1,
  SR_STATUS_INVALID_UTF8 = 2,
  /**
   * Domain, narrative or frame-rule text failed to load.
   */
  SR_STATUS_PARSE_ERROR = 3,
  /**
   * A question does not refer to the domain.
   */
  SR_STATUS_QUESTION_ERROR = 4,
  /**
   * The story has no consistent interpretation; the report is still
   * produced and carries the diagnostic.
   */
  SR_STATUS_NO_MODEL = 5,
  SR_STATUS_PANIC = 6,
} sr_status;

/**
 * Opaque engine handle.
 */
typedef struct sr_engine sr_engine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an engine. `domain_text` may be null to use the bundled
 * restaurant domain; it is validated here.
 *
 * # Safety
 * `domain_text` must be null or a nul-terminated string; `out` must be a
 * valid pointer.
 */
enum sr_status sr_engine_new(const char *domain_text, struct sr_engine **out);

/**
 * Releases an engine. Null is ignored.
 *
 * # Safety
 * `engine` must come from `sr_engine_new` and not be used afterwards.
 */
void sr_engine_free(struct sr_engine *engine);

/**
 * Sets search limits. `max_models` of 0 means unlimited; `parallelism`
 * of 0 uses all cores.
 *
 * # Safety
 * `engine` must be a live handle.
 */
enum sr_status sr_engine_configure(struct sr_engine *engine,
                                   size_t horizon,
                                   size_t max_models,
                                   size_t max_abductions,
                                   size_t parallelism);

/**
 * Sets frame mapping rules (null restores the bundled rules) and strict
 * frame handling.
 *
 * # Safety
 * `engine` must be a live handle; `rules_text` null or nul-terminated.
 */
enum sr_status sr_engine_set_frame_rules(struct sr_engine *engine,
                                         const char *rules_text,
                                         bool strict);

/**
 * Interprets a narrative and writes its JSON report to `out_json`.
 * Questions in the narrative are answered in the report.
 *
 * # Safety
 * `engine` must be a live handle, `story_text` nul-terminated and
 * `out_json` a valid pointer. The returned string must be released with
 * `sr_string_free`.
 */
enum sr_status sr_interpret(const struct sr_engine *engine,
                            const char *story_text,
                            char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void sr_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *sr_last_error(void);

/**
 * Library version as a static string.
 */
const char *sr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STORYREADER_H */
