/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef IFAGENT_H
#define IFAGENT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IfaStatus {
  IFA_STATUS_OK = 0,
  IFA_STATUS_NULL_ARGUMENT = 1,
  IFA_STATUS_INVALID_UTF8 = 2,
  IFA_STATUS_USAGE = 3,
  IFA_STATUS_FORMAT = 4,
  IFA_STATUS_IO = 5,
  IFA_STATUS_ENVIRONMENT = 6,
  IFA_STATUS_NOT_FOUND = 7,
  IFA_STATUS_PANIC = 8,
} IfaStatus;

// A game plus agent settings. Manual play through [`ifa_session_step`]
// and whole agent episodes through [`ifa_session_run`] use separate game
// instances.
typedef struct IfaSession IfaSession;

// One game response. `description` belongs to the caller.
typedef struct IfaPercept {
  char *description;
  int64_t score;
  uint32_t moves;
  bool dead;
  bool won;
} IfaPercept;

// Summary of one played episode.
typedef struct IfaEpisode {
  int64_t final_score;
  int64_t best_observed;
  // -1 when the game does not report it.
  int64_t max_score;
  // NaN when the maximum score is unknown.
  double modified_score;
  uint32_t steps;
  uint32_t lives;
  bool won;
  bool replayed;
  // The environment broke down mid-episode; see the transcript.
  bool failed;
} IfaEpisode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string.
const char *ifa_version(void);

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *ifa_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void ifa_string_free(char *s);

// Opens a simulator session on a bundled world name or a `.world` file.
// `config` holds `key = value` lines and may be NULL for the defaults.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum IfaStatus ifa_session_open(const char *world, const char *config, struct IfaSession **out);

// Opens a session on a story file run by an external interpreter.
// `program` may be NULL to use the `IFAGENT_INTERPRETER` variable;
// `max_score` below 0 means unknown.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum IfaStatus ifa_session_open_interpreter(const char *program,
                                            const char *story,
                                            int64_t max_score,
                                            const char *config,
                                            struct IfaSession **out);

// Releases a session. NULL is ignored.
//
// # Safety
// `session` must come from `ifa_session_open*` and not have been freed.
void ifa_session_free(struct IfaSession *session);

// The current percept of the manual game, e.g. the opening one.
//
// # Safety
// `session` must be live; `out` must be writable.
enum IfaStatus ifa_session_current(struct IfaSession *session, struct IfaPercept *out);

// Sends one command to the manual game.
//
// # Safety
// `session` must be live; `command` NUL-terminated; `out` writable.
enum IfaStatus ifa_session_step(struct IfaSession *session,
                                const char *command,
                                struct IfaPercept *out);

// Restarts the manual game.
//
// # Safety
// `session` must be live; `out` may be NULL.
enum IfaStatus ifa_session_restart(struct IfaSession *session, struct IfaPercept *out);

// Lets the agent play a fresh game for at most `budget` commands.
//
// # Safety
// `session` must be live; `out` writable.
enum IfaStatus ifa_session_run(struct IfaSession *session,
                               uint32_t budget,
                               uint64_t seed,
                               struct IfaEpisode *out);

// Transcript of the last [`ifa_session_run`], one tab-separated line per
// command. Writes NULL to `out` when nothing has been run yet.
//
// # Safety
// `session` must be live; `out` writable.
enum IfaStatus ifa_session_transcript(struct IfaSession *session, char **out);

// `raw / max`, plus 0.2 when `raw` is positive.
//
// # Safety
// `out` must be writable.
enum IfaStatus ifa_modified_score(double raw, double max, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IFAGENT_H */
