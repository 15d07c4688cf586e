#ifndef REACHEQ_H
#define REACHEQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a library call. Values 2 and 3 mirror the CLI exit codes.
 */
typedef enum ReacheqStatus {
  /**
   * Success; for decisions, the answer is yes.
   */
  ReacheqOk = 0,
  /**
   * The call succeeded and the answer is no.
   */
  ReacheqNo = 1,
  /**
   * Malformed input: game text, formula, bounds, machines.
   */
  ReacheqErrInput = 2,
  /**
   * An internal limit was hit (fixpoint rounds or search size).
   */
  ReacheqErrLimit = 3,
  /**
   * A required pointer argument was NULL.
   */
  ReacheqErrNull = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  ReacheqErrUtf8 = 5,
} ReacheqStatus;

/**
 * A parsed game. Opaque.
 */
typedef struct ReacheqGame ReacheqGame;

/**
 * A decision result with rendered witness artifacts. Opaque.
 */
typedef struct ReacheqVerdict ReacheqVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses game text into a handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum ReacheqStatus reacheq_game_parse(const char *text, struct ReacheqGame **out);

/**
 * Releases a game handle. NULL is a no-op.
 *
 * # Safety
 * `game` must be NULL or a pointer from `reacheq_game_parse` not yet freed.
 */
void reacheq_game_free(struct ReacheqGame *game);

/**
 * Number of vertices after weighted-edge expansion; 0 on NULL.
 *
 * # Safety
 * `game` must be NULL or a live game handle.
 */
uintptr_t reacheq_game_vertices(const struct ReacheqGame *game);

/**
 * Number of players; 0 on NULL.
 *
 * # Safety
 * `game` must be NULL or a live game handle.
 */
uintptr_t reacheq_game_players(const struct ReacheqGame *game);

/**
 * Decides the threshold problem. `spe` 0 = Nash, nonzero = subgame-perfect.
 * `upper`/`lower` use the bound-list syntax (`6,3<,-,inf`); NULL means
 * unconstrained. The answer is read with `reacheq_verdict_yes`.
 *
 * # Safety
 * `game` must be a live handle; `upper`/`lower` NULL or NUL-terminated;
 * `out` valid for writes.
 */
enum ReacheqStatus reacheq_solve_threshold(const struct ReacheqGame *game,
                                           int spe,
                                           const char *upper,
                                           const char *lower,
                                           struct ReacheqVerdict **out);

/**
 * Decides the social-welfare problem: at least `visitors` players served,
 * or exactly that many with total served cost at most `total` (`"inf"` or
 * NULL for unbounded).
 *
 * # Safety
 * As for `reacheq_solve_threshold`.
 */
enum ReacheqStatus reacheq_solve_welfare(const struct ReacheqGame *game,
                                         int spe,
                                         uintptr_t visitors,
                                         const char *total,
                                         struct ReacheqVerdict **out);

/**
 * Decides the Pareto-optimality problem.
 *
 * # Safety
 * As for `reacheq_solve_threshold`.
 */
enum ReacheqStatus reacheq_solve_pareto(const struct ReacheqGame *game,
                                        int spe,
                                        struct ReacheqVerdict **out);

/**
 * 1 when the decision answered yes, 0 otherwise (including NULL).
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
int reacheq_verdict_yes(const struct ReacheqVerdict *verdict);

/**
 * Witness play as `prefix | cycle` text, or NULL. Caller frees.
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
char *reacheq_verdict_lasso(const struct ReacheqVerdict *verdict);

/**
 * Witness cost (or gain) profile as comma-separated text, or NULL.
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
char *reacheq_verdict_profile(const struct ReacheqVerdict *verdict);

/**
 * Witness social welfare as `visitors,total`, or NULL.
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
char *reacheq_verdict_welfare(const struct ReacheqVerdict *verdict);

/**
 * Pareto front, one profile per line, or NULL.
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
char *reacheq_verdict_front(const struct ReacheqVerdict *verdict);

/**
 * Witness strategy machines in the machine file format, or NULL.
 *
 * # Safety
 * `verdict` must be NULL or a live verdict handle.
 */
char *reacheq_verdict_machines(const struct ReacheqVerdict *verdict);

/**
 * Releases a verdict handle. NULL is a no-op.
 *
 * # Safety
 * `verdict` must be NULL or a pointer from a solve call not yet freed.
 */
void reacheq_verdict_free(struct ReacheqVerdict *verdict);

/**
 * Checks a machine file against the game: `REACHEQ_OK` when the profile
 * is an equilibrium of the requested kind, `REACHEQ_NO` when it is not.
 *
 * # Safety
 * `game` must be a live handle; `machines_text` NUL-terminated.
 */
enum ReacheqStatus reacheq_verify(const struct ReacheqGame *game,
                                  int spe,
                                  const char *machines_text);

/**
 * Writes the characterization labeling to `*out_text` as `name owner
 * value` lines: coalition values of the game (`spe` = 0) or the fixpoint
 * labeling of its visit-tracking extension (`spe` nonzero). Caller frees.
 *
 * # Safety
 * `game` must be a live handle; `out_text` valid for writes.
 */
enum ReacheqStatus reacheq_values(const struct ReacheqGame *game, int spe, char **out_text);

/**
 * Releases a string returned by the library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void reacheq_string_free(char *s);

/**
 * Message describing the calling thread's most recent failure, or NULL.
 * Caller frees.
 */
char *reacheq_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REACHEQ_H */
