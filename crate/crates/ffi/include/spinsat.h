#ifndef SPINSAT_H
#define SPINSAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpinsatStatus {
  SPINSAT_STATUS_OK = 0,
  SPINSAT_STATUS_NULL_POINTER = 1,
  SPINSAT_STATUS_INVALID_UTF8 = 2,
  SPINSAT_STATUS_PARSE = 3,
  SPINSAT_STATUS_INVALID_ARGUMENT = 4,
  SPINSAT_STATUS_MISMATCH = 5,
  SPINSAT_STATUS_UNSATISFIABLE = 6,
  SPINSAT_STATUS_INTERNAL = 7,
  SPINSAT_STATUS_PANIC = 8,
} SpinsatStatus;

/**
 * Parsed CNF formula.
 */
typedef struct SpinsatFormula SpinsatFormula;

/**
 * Compiled pairwise Hamiltonian.
 */
typedef struct SpinsatHamiltonian SpinsatHamiltonian;

/**
 * Tail averages of one annealing run.
 */
typedef struct SpinsatAnnealResult {
  double final_energy_h;
  double final_energy_logic;
  double final_abs_m;
  /**
   * Logical energy of the last state.
   */
  double last_energy_logic;
} SpinsatAnnealResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *spinsat_last_error(void);

/**
 * Parses DIMACS text. `name` may be null.
 *
 * # Safety
 * `text` and `name` must be null or NUL-terminated; `out` must be writable.
 */
enum SpinsatStatus spinsat_formula_parse(const char *text,
                                         const char *name,
                                         bool lenient,
                                         struct SpinsatFormula **out);

/**
 * # Safety
 * `f` must be null or a handle from [`spinsat_formula_parse`] not yet freed.
 */
void spinsat_formula_free(struct SpinsatFormula *f);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live formula handle.
 */
size_t spinsat_formula_num_vars(const struct SpinsatFormula *f);

/**
 * # Safety
 * `f` must be null or a live formula handle.
 */
size_t spinsat_formula_num_clauses(const struct SpinsatFormula *f);

/**
 * Writes a model into `values` (1 true, 0 false; `len` must equal the
 * variable count). Returns `UNSATISFIABLE` when there is none.
 *
 * # Safety
 * `values` must point to `len` writable bytes.
 */
enum SpinsatStatus spinsat_formula_solve(const struct SpinsatFormula *f,
                                         uint8_t *values,
                                         size_t len);

/**
 * Number of unsatisfied clauses under `values` (nonzero is true).
 *
 * # Safety
 * `values` must point to `len` readable bytes.
 */
enum SpinsatStatus spinsat_formula_energy(const struct SpinsatFormula *f,
                                          const uint8_t *values,
                                          size_t len,
                                          size_t *out);

/**
 * Compiles a formula. `paper_literal` selects the published (inexact)
 * gadget; pass `k_factor <= 0` for the default.
 *
 * # Safety
 * `f` must be a live formula handle; `out` must be writable.
 */
enum SpinsatStatus spinsat_compile(const struct SpinsatFormula *f,
                                   double k_factor,
                                   bool paper_literal,
                                   struct SpinsatHamiltonian **out);

/**
 * # Safety
 * `h` must be null or a handle from [`spinsat_compile`] not yet freed.
 */
void spinsat_hamiltonian_free(struct SpinsatHamiltonian *h);

/**
 * Core plus ancilla spins, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live Hamiltonian handle.
 */
size_t spinsat_hamiltonian_num_spins(const struct SpinsatHamiltonian *h);

/**
 * # Safety
 * `h` must be null or a live Hamiltonian handle.
 */
size_t spinsat_hamiltonian_core_count(const struct SpinsatHamiltonian *h);

/**
 * Energy of a ±1 spin vector of length `num_spins`.
 *
 * # Safety
 * `spins` must point to `len` readable values; `out` must be writable.
 */
enum SpinsatStatus spinsat_hamiltonian_energy(const struct SpinsatHamiltonian *h,
                                              const int8_t *spins,
                                              size_t len,
                                              double *out);

/**
 * Writes the node and edge tables as NUL-terminated strings owned by the
 * caller (release with [`spinsat_string_free`]).
 *
 * # Safety
 * `nodes` and `edges` must be writable.
 */
enum SpinsatStatus spinsat_hamiltonian_tables(const struct SpinsatHamiltonian *h,
                                              char **nodes,
                                              char **edges);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void spinsat_string_free(char *s);

/**
 * Anneals `h` (compiled from `f`) with `T_t = t0 * alpha^t`. `sweeps`
 * attempts one flip per spin per step. `csv` may be null; otherwise it
 * receives the trajectory CSV, owned by the caller.
 *
 * # Safety
 * Handles must be live; `result` must be writable; `csv` null or writable.
 */
enum SpinsatStatus spinsat_anneal(const struct SpinsatHamiltonian *h,
                                  const struct SpinsatFormula *f,
                                  double t0,
                                  double alpha,
                                  size_t steps,
                                  bool sweeps,
                                  uint64_t seed,
                                  struct SpinsatAnnealResult *result,
                                  char **csv);

/**
 * Default schedule parameters. Null pointers are skipped.
 *
 * # Safety
 * Each pointer must be null or writable.
 */
void spinsat_default_schedule(double *t0, double *alpha, size_t *steps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINSAT_H */
