/* Sample plugin: planar limit cycle with an odd transverse direction,
 * w' = w(0.4 - w^2). Loaded by the CLI via [system] kind = plugin. */
#include <string.h>

#include "discwave.h"

static void field(const double* x, double* fx, void* user) {
    (void)user;
    const double r2 = x[0] * x[0] + x[1] * x[1];
    fx[0] = x[0] * (1.0 - r2) - x[1];
    fx[1] = x[1] * (1.0 - r2) + x[0];
    fx[2] = x[2] * (0.4 - x[2] * x[2]);
}

static void jacobian(const double* x, double* j, void* user) {
    (void)user;
    const double r2 = x[0] * x[0] + x[1] * x[1];
    j[0] = 1.0 - r2 - 2.0 * x[0] * x[0];
    j[1] = -1.0 - 2.0 * x[0] * x[1];
    j[2] = 0.0;
    j[3] = 1.0 - 2.0 * x[0] * x[1];
    j[4] = 1.0 - r2 - 2.0 * x[1] * x[1];
    j[5] = 0.0;
    j[6] = 0.0;
    j[7] = 0.0;
    j[8] = 0.4 - 3.0 * x[2] * x[2];
}

static const double H[9] = {-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0};
static const double GUESS[3] = {1.0, 0.0, 0.0};

int discwave_describe_system(dw_system_desc* out) {
    memset(out, 0, sizeof *out);
    out->name = "odd_oscillator";
    out->dim = 3;
    out->field = field;
    out->jacobian = jacobian;
    out->h_row_major = H;
    out->n = 2;
    out->m = 1;
    out->x_guess = GUESS;
    out->theta_guess = 3.1;
    return 0;
}
