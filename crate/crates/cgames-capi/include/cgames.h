/* SPDX-License-Identifier: Apache-2.0 */

/* C interface to the causal game semantics workbench.
 *
 * All entry points are panic-safe. Functions returning an int status use
 * the CG_* codes below; on failure, cg_last_error() returns a thread-local
 * message valid until the next failing call on the same thread.
 */

#ifndef CGAMES_H
#define CGAMES_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define CG_OK 0
#define CG_ERR_NULL 1
#define CG_ERR_UTF8 2
#define CG_ERR_PARSE 3
#define CG_ERR_TYPE 4
#define CG_ERR_BUDGET 5
#define CG_ERR_INVALID 6
#define CG_ERR_PANIC 7

/* Opaque handle to an interpreted strategy. */
typedef struct CgStrategy CgStrategy;

/* Library version string; static storage, do not free. */
const char *cg_version(void);

/* Message for the most recent error on this thread; do not free. */
const char *cg_last_error(void);

/* Free a string returned through a `char **` out-parameter. */
void cg_string_free(char *s);

/* Run a closed term operationally; *converges is 1 for may-convergence. */
int cg_run(const char *term, size_t nat_max, size_t fuel, int *converges);

/* Interpret a closed term as a causal strategy. On success *out owns a
 * handle that must be released with cg_strategy_free. */
int cg_interpret(const char *term, size_t width, size_t nat_max,
                 size_t unroll, size_t fuel, size_t max_events,
                 CgStrategy **out);

/* Release a strategy handle. */
void cg_strategy_free(CgStrategy *s);

/* Number of strategy events (0 for NULL). */
size_t cg_strategy_events(const CgStrategy *s);

/* JSON rendering of the strategy; *out must be freed with cg_string_free. */
int cg_strategy_json(const CgStrategy *s, char **out);

/* DOT rendering of the strategy; *out must be freed with cg_string_free. */
int cg_strategy_dot(const CgStrategy *s, const char *name, char **out);

/* Evaluate a named semantic condition: "deterministic", "visible",
 * "pre-innocent", "innocent", "sequential", "wb", "causally-wb",
 * "complete". *holds is 1 if it passes. */
int cg_check(const CgStrategy *s, const char *condition, size_t cap,
             int *holds);

/* Positive isomorphism of two interpreted strategies (1 = isomorphic). */
int cg_positive_iso(const CgStrategy *a, const CgStrategy *b);

/* Positional equivalence of two interpreted strategies; *equal is 1 when
 * their collapses agree. */
int cg_positionally_equivalent(const CgStrategy *a, const CgStrategy *b,
                               size_t cap, int *equal);

#ifdef __cplusplus
}
#endif

#endif /* CGAMES_H */
