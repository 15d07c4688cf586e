/* Exercises the C API end to end: parse a game, decide a threshold query,
 * verify the synthesized machines, read values, and check error paths.
 * Compiled and run by the crate's `c_smoke` integration test. */
#include <stdio.h>
#include <string.h>
#include "reacheq.h"

static const char *GAME =
    "game quantitative\n"
    "players 2\n"
    "vertex v0 owner=2\n"
    "vertex v1 owner=1 targets=2\n"
    "vertex v2 owner=1\n"
    "vertex v3 owner=1 targets=1\n"
    "vertex v4 owner=1 targets=1,2\n"
    "edge v0 v1 len=3\n"
    "edge v0 v2\n"
    "edge v2 v3\n"
    "edge v2 v4 len=2\n"
    "edge v3 v0\n"
    "edge v4 v0\n"
    "edge v1 v0\n"
    "init v0\n";

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            fprintf(stderr, "FAILED at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    ReacheqGame *game = NULL;
    CHECK(reacheq_game_parse(GAME, &game) == ReacheqOk);
    CHECK(reacheq_game_players(game) == 2);
    CHECK(reacheq_game_vertices(game) == 8);

    ReacheqVerdict *verdict = NULL;
    CHECK(reacheq_solve_threshold(game, 0, "6,3", NULL, &verdict) == ReacheqOk);
    CHECK(reacheq_verdict_yes(verdict) == 1);

    char *profile = reacheq_verdict_profile(verdict);
    CHECK(profile != NULL && strcmp(profile, "6,3") == 0);
    reacheq_string_free(profile);

    char *machines = reacheq_verdict_machines(verdict);
    CHECK(machines != NULL);
    CHECK(reacheq_verify(game, 0, machines) == ReacheqOk);
    reacheq_string_free(machines);
    reacheq_verdict_free(verdict);

    verdict = NULL;
    CHECK(reacheq_solve_threshold(game, 0, "3,3", NULL, &verdict) == ReacheqOk);
    CHECK(reacheq_verdict_yes(verdict) == 0);
    CHECK(reacheq_verdict_lasso(verdict) == NULL);
    reacheq_verdict_free(verdict);

    char *values = NULL;
    CHECK(reacheq_values(game, 0, &values) == ReacheqOk);
    CHECK(values != NULL && strstr(values, "v0 2 3") != NULL);
    reacheq_string_free(values);

    reacheq_game_free(game);

    ReacheqGame *bogus = NULL;
    CHECK(reacheq_game_parse("game bogus\n", &bogus) == ReacheqErrInput);
    CHECK(bogus == NULL);
    char *err = reacheq_last_error();
    CHECK(err != NULL && strlen(err) > 0);
    reacheq_string_free(err);

    CHECK(reacheq_solve_pareto(NULL, 0, &verdict) == ReacheqErrNull);
    puts("c smoke ok");
    return 0;
}
