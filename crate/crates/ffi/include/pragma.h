#ifndef PRAGMA_H
#define PRAGMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every call.
 */
typedef enum PragmaStatus {
  PRAGMA_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  PRAGMA_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  PRAGMA_STATUS_INVALID_UTF8 = 2,
  /*
   A file or text could not be parsed.
   */
  PRAGMA_STATUS_PARSE = 3,
  PRAGMA_STATUS_IO = 4,
  /*
   A configuration value or mode combination is not allowed.
   */
  PRAGMA_STATUS_INVALID_CONFIG = 5,
  /*
   A sentence or corpus does not fit the model or call.
   */
  PRAGMA_STATUS_INVALID_INPUT = 6,
  /*
   The model cannot answer, for example a missing table entry.
   */
  PRAGMA_STATUS_MODEL = 7,
  /*
   A remote scorer failed or misbehaved.
   */
  PRAGMA_STATUS_REMOTE = 8,
  /*
   A bug inside the library; the call had no effect.
   */
  PRAGMA_STATUS_INTERNAL = 99,
} PragmaStatus;

/*
 Speaker used by [`pragma_translate`].
 */
typedef enum PragmaMode {
  PRAGMA_MODE_S0 = 0,
  PRAGMA_MODE_S1_IP = 1,
  PRAGMA_MODE_S1_GP = 2,
  PRAGMA_MODE_S1_CGP = 3,
  PRAGMA_MODE_S1_CIP = 4,
} PragmaMode;

/*
 Opaque handle to a loaded or connected model.
 */
typedef struct PragmaModel PragmaModel;

/*
 Decoding knobs; start from [`pragma_config_default`].
 */
typedef struct PragmaConfig {
  double alpha;
  size_t candidate_width_k;
  size_t beam_width;
  size_t max_len;
} PragmaConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Loads a tabular model file.

 # Safety
 `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum PragmaStatus pragma_model_load(const char *path, struct PragmaModel **out);

/*
 Parses a tabular model from text.

 # Safety
 `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum PragmaStatus pragma_model_parse(const char *text, struct PragmaModel **out);

/*
 Connects to a scorer at `tcp://host:port` or `stdio:<command>`.

 # Safety
 `endpoint` must be a NUL-terminated string and `out` valid for writes.
 */
enum PragmaStatus pragma_model_connect(const char *endpoint,
                                       uint64_t timeout_ms,
                                       struct PragmaModel **out);

/*
 Releases a model. Null is ignored.

 # Safety
 `model` must be null or a handle not yet freed.
 */
void pragma_model_free(struct PragmaModel *model);

/*
 Copies the model's identity tag into `out`.

 # Safety
 `model` must be a live handle and `out` valid for writes.
 */
enum PragmaStatus pragma_model_identity_tag(const struct PragmaModel *model, char **out);

/*
 Default decoding configuration.
 */
struct PragmaConfig pragma_config_default(void);

/*
 Translates one whitespace-tokenized sentence. `bwd` may be null for
 modes that do not use a backward model. Distractor modes fail with
 `InvalidConfig`; use [`pragma_translate_with_distractors`].

 # Safety
 Handles must be live, strings NUL-terminated, and `out` valid for writes.
 */
enum PragmaStatus pragma_translate(enum PragmaMode mode,
                                   const struct PragmaModel *fwd,
                                   const struct PragmaModel *bwd,
                                   const struct PragmaConfig *config,
                                   const char *source,
                                   char **out);

/*
 Translates one sentence against an explicit distractor set, which must
 contain the source.

 # Safety
 As [`pragma_translate`]; `distractors` must point to `n_distractors`
 NUL-terminated strings.
 */
enum PragmaStatus pragma_translate_with_distractors(enum PragmaMode mode,
                                                    const struct PragmaModel *fwd,
                                                    const struct PragmaModel *bwd,
                                                    const struct PragmaConfig *config,
                                                    const char *source,
                                                    const char *const *distractors,
                                                    size_t n_distractors,
                                                    char **out);

/*
 Corpus BLEU in `[0, 100]` over whitespace-tokenized lines.

 # Safety
 `hypotheses` and `references` must each point to `n` NUL-terminated
 strings; `out` must be valid for writes.
 */
enum PragmaStatus pragma_bleu_corpus(const char *const *hypotheses,
                                     const char *const *references,
                                     size_t n,
                                     size_t max_order,
                                     double *out);

/*
 Message for the last failed call on this thread, or null. Valid until
 the next call on the same thread; do not free.
 */
const char *pragma_last_error_message(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void pragma_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRAGMA_H */
