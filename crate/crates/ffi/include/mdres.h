#ifndef MDRES_H
#define MDRES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum MdresStatus {
  MDRES_STATUS_OK = 0,
  // Malformed input files, query text or arguments.
  MDRES_STATUS_INVALID_INPUT = 1,
  // The MD set or query is outside the class the operation requires.
  MDRES_STATUS_INELIGIBLE = 2,
  // The exhaustive chase hit one of its bounds.
  MDRES_STATUS_BOUNDS_EXCEEDED = 3,
  // A required pointer argument was null.
  MDRES_STATUS_NULL_POINTER = 4,
  // A string argument was not valid UTF-8.
  MDRES_STATUS_UTF8 = 5,
  // A file could not be read or written.
  MDRES_STATUS_IO = 6,
  // An unexpected internal failure.
  MDRES_STATUS_INTERNAL = 7,
} MdresStatus;

// A loaded instance with its MDs.
typedef struct MdresSession MdresSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Loads a directory holding `schema.txt`, `data/`, `mds.txt` and optionally
// `sims.txt`. On success `*out` owns a session freed by [`mdres_session_free`].
//
// # Safety
// `dir` must be a nul-terminated string and `out` a writable pointer.
enum MdresStatus mdres_session_load_dir(const char *dir, struct MdresSession **out);

// Loads a session from explicit paths. `sims` may be null, meaning equality only.
//
// # Safety
// Non-null string arguments must be nul-terminated and `out` writable.
enum MdresStatus mdres_session_load(const char *schema,
                                    const char *data_dir,
                                    const char *mds,
                                    const char *sims,
                                    struct MdresSession **out);

// Releases a session. Null is ignored.
//
// # Safety
// `s` must come from a load function and not have been freed.
void mdres_session_free(struct MdresSession *s);

// Tractability class of the session's MD set, as JSON.
//
// # Safety
// `s` must be a live session and `out` writable.
enum MdresStatus mdres_classify_json(const struct MdresSession *s, char **out);

// Closure blocks with value frequencies, as JSON.
//
// # Safety
// `s` must be a live session and `out` writable.
enum MdresStatus mdres_closure_json(const struct MdresSession *s, char **out);

// The MRI family of a non-interacting or hit-simple-cyclic set, with up to
// `max_materialized` MRIs listed.
//
// # Safety
// `s` must be a live session and `out` writable.
enum MdresStatus mdres_resolve_json(const struct MdresSession *s,
                                    size_t max_materialized,
                                    char **out);

// Resolved answers to `query`. `mode` is `"auto"`, `"rewrite"` or `"oracle"`;
// null means `"auto"`. The oracle runs under its default bounds.
//
// # Safety
// `s` must be a live session, string arguments nul-terminated and `out` writable.
enum MdresStatus mdres_answers_json(const struct MdresSession *s,
                                    const char *query,
                                    const char *mode,
                                    char **out);

// MRIs by exhaustive chase. `max_states` of zero keeps the default bound.
//
// # Safety
// `s` must be a live session and `out` writable.
enum MdresStatus mdres_oracle_json(const struct MdresSession *s,
                                   size_t max_states,
                                   size_t max_materialized,
                                   char **out);

// The Datalog program computing the closure.
//
// # Safety
// `s` must be a live session and `out` writable.
enum MdresStatus mdres_emit_datalog(const struct MdresSession *s, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `p` must come from this library and not have been freed.
void mdres_string_free(char *p);

// Message for the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *mdres_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MDRES_H */
