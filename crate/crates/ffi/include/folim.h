#ifndef FOLIM_H
#define FOLIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FolimSide {
  FOLIM_SIDE_LEFT = 0,
  FOLIM_SIDE_RIGHT = 1,
} FolimSide;

typedef enum FolimStatus {
  FOLIM_STATUS_OK = 0,
  FOLIM_STATUS_NULL_POINTER = 1,
  FOLIM_STATUS_INVALID_UTF8 = 2,
  FOLIM_STATUS_PARSE = 3,
  FOLIM_STATUS_GRAPH = 4,
  FOLIM_STATUS_EVAL = 5,
  FOLIM_STATUS_CAP_EXCEEDED = 6,
  FOLIM_STATUS_GAME = 7,
  FOLIM_STATUS_PRECONDITION = 8,
  FOLIM_STATUS_STRATEGY = 9,
  FOLIM_STATUS_INVALID_ARGUMENT = 10,
  FOLIM_STATUS_PANIC = 11,
} FolimStatus;

typedef enum FolimWinner {
  FOLIM_WINNER_SPOILER = 0,
  FOLIM_WINNER_DUPLICATOR = 1,
} FolimWinner;

// Opaque formula handle.
typedef struct FolimFormula FolimFormula;

// Opaque graph handle.
typedef struct FolimGraph FolimGraph;

// Opaque duplicator-strategy handle; advances with each response.
typedef struct FolimStrategy FolimStrategy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next call on the same thread.
const char *folim_last_error(void);

// Library version as a static string.
const char *folim_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void folim_string_free(char *s);

// Builds `H_n`.
//
// # Safety
// `out_graph` must be a valid pointer.
enum FolimStatus folim_graph_hn(uint32_t n, struct FolimGraph **out_graph);

// Parses a graph from JSON or edge-list text.
//
// # Safety
// `src` must be a nul-terminated string and `out_graph` a valid pointer.
enum FolimStatus folim_graph_parse(const char *src, struct FolimGraph **out_graph);

// # Safety
// `g` must be a live graph handle.
enum FolimStatus folim_graph_order(const struct FolimGraph *g, uintptr_t *out_order);

// The graph as JSON; free the result with [`folim_string_free`].
//
// # Safety
// `g` must be a live graph handle and `out_json` a valid pointer.
enum FolimStatus folim_graph_to_json(const struct FolimGraph *g, char **out_json);

// # Safety
// `g` must be null or a handle not yet freed.
void folim_graph_free(struct FolimGraph *g);

// # Safety
// `src` must be a nul-terminated string and `out_formula` a valid pointer.
enum FolimStatus folim_formula_parse(const char *src, struct FolimFormula **out_formula);

// Canonical text of the formula; free with [`folim_string_free`].
//
// # Safety
// `f` must be a live formula handle and `out_text` a valid pointer.
enum FolimStatus folim_formula_to_string(const struct FolimFormula *f, char **out_text);

// # Safety
// `f` must be null or a handle not yet freed.
void folim_formula_free(struct FolimFormula *f);

// Exact Stone pairing as a reduced fraction.
//
// # Safety
// Handles must be live; out-pointers valid.
enum FolimStatus folim_stone_exact(const struct FolimGraph *g,
                                   const struct FolimFormula *f,
                                   uint64_t *out_numer,
                                   uint64_t *out_denom);

// Sampled Stone pairing with its 99% Hoeffding radius.
//
// # Safety
// Handles must be live; out-pointers valid.
enum FolimStatus folim_stone_mc(const struct FolimGraph *g,
                                const struct FolimFormula *f,
                                uint64_t samples,
                                uint64_t seed,
                                double *out_estimate,
                                double *out_radius);

// Winner of the `rounds`-round game on the two graphs, without roots.
//
// # Safety
// Handles must be live; `out_winner` valid.
enum FolimStatus folim_ef_solve(const struct FolimGraph *left,
                                const struct FolimGraph *right,
                                uintptr_t rounds,
                                enum FolimWinner *out_winner);

// Duplicator strategy for a `p`-round game from the empty position.
// Fails with [`FolimStatus::Precondition`] when the graphs do not qualify.
//
// # Safety
// Handles must be live; `out_strategy` valid.
enum FolimStatus folim_strategy_new(const struct FolimGraph *left,
                                    const struct FolimGraph *right,
                                    uintptr_t p,
                                    struct FolimStrategy **out_strategy);

// Answers the spoiler's `vertex` on `side` and advances the strategy.
//
// # Safety
// `s` must be a live strategy handle; `out_response` valid.
enum FolimStatus folim_strategy_respond(struct FolimStrategy *s,
                                        enum FolimSide side,
                                        uintptr_t vertex,
                                        uintptr_t *out_response);

// Rounds the strategy can still answer.
//
// # Safety
// `s` must be a live strategy handle.
enum FolimStatus folim_strategy_budget(const struct FolimStrategy *s, uintptr_t *out_budget);

// # Safety
// `s` must be null or a handle not yet freed.
void folim_strategy_free(struct FolimStrategy *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOLIM_H */
