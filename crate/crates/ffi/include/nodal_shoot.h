#ifndef NODAL_SHOOT_H
#define NODAL_SHOOT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. Values 1 to 5 match the command-line exit codes.
 */
typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_VERIFICATION_FAILED = 1,
  NS_STATUS_INVALID_INPUT = 2,
  NS_STATUS_BUDGET_EXHAUSTED = 3,
  NS_STATUS_NOT_FOUND = 4,
  NS_STATUS_EXPONENT_PRECONDITION = 5,
  NS_STATUS_NULL_POINTER = 6,
  NS_STATUS_PANIC = 7,
} NsStatus;

/*
 Endpoint a shot starts from.
 */
typedef enum NsSide {
  NS_SIDE_LEFT = 0,
  NS_SIDE_RIGHT = 1,
} NsSide;

/*
 A profile together with ODE parameters.
 */
typedef struct NsProblem NsProblem;

/*
 A matched and verified solution.
 */
typedef struct NsSolution NsSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *ns_version(void);

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next call into this library on the same thread.
 */
const char *ns_last_error_message(void);

/*
 Creates a problem with the model profile
 `h(t) = H0 s cot(s t) - Hd s tan(s t)`, `s = pi / (2d)`.

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum NsStatus ns_problem_new_model(uint32_t n,
                                   uint32_t m1,
                                   uint32_t m2,
                                   double d,
                                   double lambda,
                                   double q,
                                   struct NsProblem **out);

/*
 Creates a problem with a closed-form profile in `t` and `d`.

 # Safety
 `expression` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NsStatus ns_problem_new_custom(uint32_t n,
                                    uint32_t m1,
                                    uint32_t m2,
                                    double d,
                                    const char *expression,
                                    double lambda,
                                    double q,
                                    struct NsProblem **out);

/*
 # Safety
 `problem` must be a live handle from this library.
 */
enum NsStatus ns_problem_set_tolerances(struct NsProblem *problem, double tol_abs, double tol_rel);

/*
 Releases a problem. NULL is ignored.

 # Safety
 `problem` must be NULL or a handle not yet freed.
 */
void ns_problem_free(struct NsProblem *problem);

/*
 The zero `t0` of the profile.

 # Safety
 `problem` must be a live handle and `out` a valid pointer.
 */
enum NsStatus ns_problem_t0(const struct NsProblem *problem, double *out);

/*
 Checks `q < p_G` and the endpoint exponent condition. Writes `p_G`
 (infinity when `n - m <= 2`) to `out_p_g` when it is not NULL.

 # Safety
 `out_p_g` must be NULL or a valid pointer.
 */
enum NsStatus ns_check_exponent(uint32_t n, uint32_t m1, uint32_t m2, double q, double *out_p_g);

/*
 Shoots from one endpoint to `t0`. Any output pointer may be NULL.

 # Safety
 `problem` must be a live handle; non-NULL outputs must be valid.
 */
enum NsStatus ns_shoot(const struct NsProblem *problem,
                       enum NsSide side,
                       double param,
                       double *out_u,
                       double *out_up,
                       size_t *out_zeros);

/*
 Searches for a solution with exactly `k` interior zeros using default
 search settings. A solution that matched but failed verification is
 still returned, with status `NS_STATUS_VERIFICATION_FAILED`.

 # Safety
 `problem` must be a live handle and `out` a valid pointer.
 */
enum NsStatus ns_find_nodal(const struct NsProblem *problem, size_t k, struct NsSolution **out);

/*
 Releases a solution. NULL is ignored.

 # Safety
 `solution` must be NULL or a handle not yet freed.
 */
void ns_solution_free(struct NsSolution *solution);

/*
 `u(0)`; NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double ns_solution_alpha(const struct NsSolution *solution);

/*
 `u(d)`, including its sign; NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double ns_solution_beta(const struct NsSolution *solution);

/*
 # Safety
 `solution` must be NULL or a live handle.
 */
size_t ns_solution_zero_count(const struct NsSolution *solution);

/*
 Finite-difference residual of the stored grid; NaN for NULL.

 # Safety
 `solution` must be NULL or a live handle.
 */
double ns_solution_residual(const struct NsSolution *solution);

/*
 # Safety
 `solution` must be NULL or a live handle.
 */
bool ns_solution_passed(const struct NsSolution *solution);

/*
 # Safety
 `solution` must be NULL or a live handle.
 */
size_t ns_solution_grid_len(const struct NsSolution *solution);

/*
 Copies the grid into three arrays of at least `capacity` elements.

 # Safety
 `solution` must be a live handle; `t`, `u`, `up` must each hold
 `capacity` doubles.
 */
enum NsStatus ns_solution_grid(const struct NsSolution *solution,
                               double *t,
                               double *u,
                               double *up,
                               size_t capacity);

/*
 Copies up to `capacity` zero locations and writes the total count to
 `out_len`.

 # Safety
 `solution` must be a live handle; `zeros` must hold `capacity` doubles
 (it may be NULL when `capacity` is 0); `out_len` must be valid.
 */
enum NsStatus ns_solution_zeros(const struct NsSolution *solution,
                                double *zeros,
                                size_t capacity,
                                size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NODAL_SHOOT_H */
