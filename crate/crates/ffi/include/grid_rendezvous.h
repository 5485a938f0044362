#ifndef GRID_RENDEZVOUS_H
#define GRID_RENDEZVOUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call. Values are stable.
 */
typedef enum RdvStatus {
  RDV_STATUS_OK = 0,
  RDV_STATUS_NULL_POINTER = 1,
  /**
   * Bad dimensions, door, or a vertex outside the grid.
   */
  RDV_STATUS_INVALID_GRID = 2,
  /**
   * Bad parameters, enum value, string or script.
   */
  RDV_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The resource strategy or script produced an illegal or missing move.
   */
  RDV_STATUS_ADVERSARY_FAILED = 4,
  RDV_STATUS_EPISODE_FINISHED = 5,
  RDV_STATUS_MALFORMED_TRACE = 6,
  RDV_STATUS_STATE_SPACE_EXCEEDED = 7,
  /**
   * A bug inside the library; the handle should be freed.
   */
  RDV_STATUS_INTERNAL = 99,
} RdvStatus;

typedef enum RdvAdversary {
  RDV_ADVERSARY_GREEDY = 0,
  RDV_ADVERSARY_STAY_MAX_RANDOM = 1,
  RDV_ADVERSARY_OSCILLATOR = 2,
} RdvAdversary;

typedef enum RdvEntry {
  RDV_ENTRY_DEFAULT = 0,
  RDV_ENTRY_ALTERNATE = 1,
} RdvEntry;

typedef enum RdvCornerGuard {
  RDV_CORNER_GUARD_ANY_CORNER = 0,
  RDV_CORNER_GUARD_FAR_CORNER = 1,
} RdvCornerGuard;

typedef enum RdvProgress {
  RDV_PROGRESS_RUNNING = 0,
  RDV_PROGRESS_RENDEZVOUS = 1,
  RDV_PROGRESS_MAX_ROUNDS_EXCEEDED = 2,
  RDV_PROGRESS_VIOLATION = 3,
  RDV_PROGRESS_NO_ESCAPE = 4,
} RdvProgress;

typedef enum RdvRobotStatus {
  RDV_ROBOT_STATUS_OUTSIDE = 0,
  RDV_ROBOT_STATUS_ACTIVE = 1,
  RDV_ROBOT_STATUS_TERMINATED = 2,
} RdvRobotStatus;

typedef enum RdvPhase {
  RDV_PHASE_ENTRY = 0,
  RDV_PHASE_BOUNDARY = 1,
  RDV_PHASE_GATHER = 2,
  RDV_PHASE_DONE = 3,
} RdvPhase;

typedef enum RdvWorstKind {
  RDV_WORST_KIND_FINITE = 0,
  RDV_WORST_KIND_NON_TERMINATING = 1,
  RDV_WORST_KIND_VIOLATION = 2,
} RdvWorstKind;

/**
 * Opaque simulation handle.
 */
typedef struct RdvSim RdvSim;

/**
 * Episode parameters.
 */
typedef struct RdvSimConfig {
  int32_t m;
  int32_t n;
  uint32_t t_f;
  /**
   * When false, the initial resource vertex is derived from `seed`.
   */
  bool has_g0;
  int32_t g0_x;
  int32_t g0_y;
  /**
   * Ignored by `rdv_sim_new_scripted`.
   */
  enum RdvAdversary adversary;
  uint64_t seed;
  /**
   * 0 selects the default 10·(T_f+1)·(m+n).
   */
  uint64_t max_rounds;
  enum RdvEntry entry;
  enum RdvCornerGuard corner_guard;
} RdvSimConfig;

/**
 * A robot; `x` and `y` are -1 while it is outside.
 */
typedef struct RdvRobot {
  enum RdvRobotStatus status;
  int32_t x;
  int32_t y;
} RdvRobot;

/**
 * Configuration at the start of `round`.
 */
typedef struct RdvState {
  uint64_t round;
  struct RdvRobot r1;
  struct RdvRobot r2;
  int32_t res_x;
  int32_t res_y;
  bool res_fixed;
  uint32_t res_stay;
  enum RdvPhase phase;
  enum RdvProgress progress;
} RdvState;

typedef struct RdvWorstCase {
  enum RdvWorstKind kind;
  /**
   * Valid when `kind` is `Finite`.
   */
  uint64_t rounds;
  uint64_t boundary_worst;
  uint64_t gather_worst;
  uint64_t states_explored;
  /**
   * Start of the witness play.
   */
  int32_t witness_g0_x;
  int32_t witness_g0_y;
  enum RdvEntry witness_entry;
  uint64_t witness_len;
} RdvWorstCase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a simulation. `*out` receives the handle on success.
 *
 * # Safety
 * `config` must point to a valid `RdvSimConfig` whose enum fields hold
 * declared values, and `out` to writable memory.
 */
enum RdvStatus rdv_sim_new(const struct RdvSimConfig *config, struct RdvSim **out);

/**
 * Creates a simulation whose resource follows `script`: one move per line,
 * `stay` or `step X Y`, `#` starts a comment.
 *
 * # Safety
 * `config` and `script` must be valid, `script` NUL-terminated, `out` writable.
 */
enum RdvStatus rdv_sim_new_scripted(const struct RdvSimConfig *config,
                                    const char *script,
                                    struct RdvSim **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sim` must come from `rdv_sim_new*` and not be used afterwards.
 */
void rdv_sim_free(struct RdvSim *sim);

/**
 * Plays one round. `*out` (may be null) receives the progress afterwards.
 *
 * # Safety
 * `sim` must be a live handle; `out` null or writable.
 */
enum RdvStatus rdv_sim_step(struct RdvSim *sim, enum RdvProgress *out);

/**
 * Plays until the episode ends. `*out` (may be null) receives the result.
 *
 * # Safety
 * `sim` must be a live handle; `out` null or writable.
 */
enum RdvStatus rdv_sim_run(struct RdvSim *sim, enum RdvProgress *out);

/**
 * Copies the current configuration into `*out`.
 *
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum RdvStatus rdv_sim_state(struct RdvSim *sim, struct RdvState *out);

/**
 * The finished episode's trace as JSON lines; `InvalidArgument` while the
 * episode is still running. Free the string with `rdv_string_free`.
 *
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum RdvStatus rdv_sim_trace_jsonl(struct RdvSim *sim, char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rdv_string_free(char *s);

/**
 * Exhaustive worst case for one cell.
 *
 * # Safety
 * `out` must be writable.
 */
enum RdvStatus rdv_worst_case(int32_t m,
                              int32_t n,
                              uint32_t t_f,
                              bool branch_entry,
                              enum RdvCornerGuard corner_guard,
                              struct RdvWorstCase *out);

/**
 * Semi-synchronous run against the escaping resource, one robot activated
 * per round in alternation, resource starting at the far corner.
 * `*out` receives the result, `*rounds` (may be null) the last round.
 *
 * # Safety
 * `out` must be writable; `rounds` null or writable.
 */
enum RdvStatus rdv_ssync_escape(int32_t m,
                                int32_t n,
                                uint32_t t_f,
                                uint64_t max_rounds,
                                uint32_t lookahead,
                                enum RdvProgress *out,
                                uint64_t *rounds);

/**
 * Message of the last failing call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *rdv_last_error(void);

/**
 * Static name of a status code.
 */
const char *rdv_status_name(enum RdvStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRID_RENDEZVOUS_H */
