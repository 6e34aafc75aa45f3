#ifndef CM2_H
#define CM2_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a fallible call.
 */
enum Cm2Status {
  CM2_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  CM2_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CM2_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed XML, hOCR, CSV or registry input.
   */
  CM2_STATUS_PARSE_ERROR = 3,
  /**
   * A training keyword does not occur in its sample document.
   */
  CM2_STATUS_KEYWORD_NOT_FOUND = 4,
  /**
   * Input parsed but violates a rule, such as a duplicate class.
   */
  CM2_STATUS_INVALID_INPUT = 5,
  CM2_STATUS_IO_ERROR = 6,
  /**
   * A bug inside the library; the call had no effect.
   */
  CM2_STATUS_PANIC = 7,
};

/**
 * A parsed OCR document.
 */
struct Cm2Document;

/**
 * Registered classes and their keyword coordinates.
 */
struct Cm2Registry;

/**
 * Outcome of one classification.
 */
struct Cm2Result;

/**
 * Matching and scoring parameters. Pass NULL wherever a config is accepted
 * to use [`cm2_config_default`].
 */
struct Cm2Config {
  uint32_t max_penalty;
  uint32_t line_tolerance;
  uint32_t gap_tolerance;
  uint32_t page_index;
};

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or "" after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *cm2_last_error(void);

struct Cm2Config cm2_config_default(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer returned as `char *` by this library and
 * not yet freed.
 */
void cm2_string_free(char *s);

/**
 * Creates an empty registry.
 *
 * # Safety
 * `out` must be NULL or writable.
 */
enum Cm2Status cm2_registry_new(struct Cm2Registry **out);

/**
 * Loads a registry file.
 *
 * # Safety
 * `path` must be NULL or NUL-terminated; `out` must be NULL or writable.
 */
enum Cm2Status cm2_registry_load_file(const char *path, struct Cm2Registry **out);

/**
 * Parses registry text held in memory.
 *
 * # Safety
 * `data` must point to `len` readable bytes (or be NULL when `len` is 0);
 * `out` must be NULL or writable.
 */
enum Cm2Status cm2_registry_load_bytes(const uint8_t *data, size_t len, struct Cm2Registry **out);

/**
 * Writes the registry to `path`, replacing any existing file.
 *
 * # Safety
 * `registry` must be NULL or a live handle; `path` NULL or NUL-terminated.
 */
enum Cm2Status cm2_registry_save_file(const struct Cm2Registry *registry, const char *path);

/**
 * Registers `class_id` from a sample document and its keyword CSV
 * (`keyword,value` records). On failure the registry is unchanged.
 *
 * # Safety
 * Handles must be NULL or live; `class_id` NULL or NUL-terminated;
 * `keywords_csv` must point to `len` readable bytes; `config` NULL or valid.
 */
enum Cm2Status cm2_registry_add_template(struct Cm2Registry *registry,
                                         const char *class_id,
                                         const struct Cm2Document *sample,
                                         const uint8_t *keywords_csv,
                                         size_t len,
                                         const struct Cm2Config *config);

/**
 * Number of registered classes. 0 for NULL.
 *
 * # Safety
 * `registry` must be NULL or a live handle.
 */
size_t cm2_registry_class_count(const struct Cm2Registry *registry);

/**
 * Number of keyword rows across all classes. 0 for NULL.
 *
 * # Safety
 * `registry` must be NULL or a live handle.
 */
size_t cm2_registry_row_count(const struct Cm2Registry *registry);

/**
 * # Safety
 * `registry` must be NULL or a handle from this library, not yet freed.
 */
void cm2_registry_free(struct Cm2Registry *registry);

/**
 * Parses a document in the canonical word XML format. `source_name` labels
 * error messages and may be NULL.
 *
 * # Safety
 * `data` must point to `len` readable bytes; strings NULL or
 * NUL-terminated; `out` NULL or writable.
 */
enum Cm2Status cm2_document_parse_xml(const uint8_t *data,
                                      size_t len,
                                      const char *source_name,
                                      struct Cm2Document **out);

/**
 * Parses an hOCR document and gives it the id `doc_id`.
 *
 * # Safety
 * As for [`cm2_document_parse_xml`]; `doc_id` must be non-NULL.
 */
enum Cm2Status cm2_document_parse_hocr(const uint8_t *data,
                                       size_t len,
                                       const char *doc_id,
                                       struct Cm2Document **out);

/**
 * Reads a document file: hOCR for `.hocr`, `.html`, `.htm` and `.xhtml`,
 * canonical word XML otherwise.
 *
 * # Safety
 * `path` NULL or NUL-terminated; `out` NULL or writable.
 */
enum Cm2Status cm2_document_load_file(const char *path, struct Cm2Document **out);

/**
 * Words on all pages. 0 for NULL.
 *
 * # Safety
 * `document` must be NULL or a live handle.
 */
size_t cm2_document_word_count(const struct Cm2Document *document);

/**
 * # Safety
 * `document` must be NULL or a handle from this library, not yet freed.
 */
void cm2_document_free(struct Cm2Document *document);

/**
 * Classifies `document` against `registry`. A rejection is a successful
 * call; check [`cm2_result_is_rejected`].
 *
 * # Safety
 * Handles NULL or live; `config` NULL or valid; `out` NULL or writable.
 */
enum Cm2Status cm2_classify(const struct Cm2Registry *registry,
                            const struct Cm2Document *document,
                            const struct Cm2Config *config,
                            struct Cm2Result **out);

/**
 * True when no class scored below the maximum penalty. False for NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
bool cm2_result_is_rejected(const struct Cm2Result *result);

/**
 * Predicted class id, or NULL on rejection. Borrowed from `result`.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
const char *cm2_result_predicted(const struct Cm2Result *result);

/**
 * Winning mean distance as an exact fraction (the maximum penalty over 1 on
 * rejection).
 *
 * # Safety
 * `result` NULL or live; `numerator` and `denominator` NULL or writable.
 */
enum Cm2Status cm2_result_score(const struct Cm2Result *result,
                                uint64_t *numerator,
                                uint64_t *denominator);

/**
 * Winning mean distance as a double. NaN for NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
double cm2_result_score_f64(const struct Cm2Result *result);

/**
 * Line-oriented `key=value` rendering. Free with [`cm2_string_free`].
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
char *cm2_result_to_structured(const struct Cm2Result *result);

/**
 * Per-keyword distance table. Free with [`cm2_string_free`].
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
char *cm2_result_explain(const struct Cm2Result *result);

/**
 * # Safety
 * `result` must be NULL or a handle from this library, not yet freed.
 */
void cm2_result_free(struct Cm2Result *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CM2_H */
