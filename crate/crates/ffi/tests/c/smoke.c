#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "nodal_shoot.h"

int main(void) {
    NsProblem *problem = NULL;
    if (ns_problem_new_model(4, 1, 1, M_PI / 2.0, 4.0, 3.0, &problem) != NS_STATUS_OK) {
        fprintf(stderr, "create: %s\n", ns_last_error_message());
        return 1;
    }
    double t0 = 0.0;
    if (ns_problem_t0(problem, &t0) != NS_STATUS_OK || fabs(t0 - M_PI / 4.0) > 1e-10) {
        return 2;
    }
    NsSolution *sol = NULL;
    if (ns_find_nodal(problem, 2, &sol) != NS_STATUS_OK) {
        fprintf(stderr, "match: %s\n", ns_last_error_message());
        return 3;
    }
    size_t n = ns_solution_grid_len(sol);
    double *t = malloc(n * sizeof *t);
    double *u = malloc(n * sizeof *u);
    double *up = malloc(n * sizeof *up);
    if (ns_solution_grid(sol, t, u, up, n) != NS_STATUS_OK) {
        return 4;
    }
    double zeros[8];
    size_t nz = 0;
    ns_solution_zeros(sol, zeros, 8, &nz);
    printf("alpha=%.12f beta=%.12f zeros=%zu first=%.12f u0=%.12f\n",
           ns_solution_alpha(sol), ns_solution_beta(sol), nz, zeros[0], u[0]);
    int ok = nz == 2 && ns_solution_passed(sol) && u[0] == ns_solution_alpha(sol);

    NsProblem *bad = NULL;
    NsStatus s = ns_problem_new_model(4, 3, 1, 1.0, 4.0, 3.0, &bad);
    ok = ok && s == NS_STATUS_INVALID_INPUT && bad == NULL && ns_last_error_message() != NULL;

    free(t);
    free(u);
    free(up);
    ns_solution_free(sol);
    ns_problem_free(problem);
    return ok ? 0 : 5;
}
