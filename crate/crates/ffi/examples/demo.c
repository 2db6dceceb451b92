/* Downscale a uniform wind over a Gaussian hill through the C interface. */
#include <stdio.h>
#include <stdlib.h>

#include "femwind.h"

#define CHECK(call)                                                              \
    do {                                                                         \
        FwStatus s_ = (call);                                                    \
        if (s_ != FW_STATUS_OK) {                                                \
            fprintf(stderr, "%s: %s\n", fw_status_string(s_), fw_last_error()); \
            return 1;                                                            \
        }                                                                        \
    } while (0)

int main(void) {
    FwTerrain *terrain = NULL;
    FwRequest *req = NULL;
    FwResult *res = NULL;
    CHECK(fw_terrain_synthetic(FW_TERRAIN_HILL, 17, 17, 30.0, 30.0, 40.0, 90.0, &terrain));
    CHECK(fw_request_new(terrain, 8, 400.0, 1.2, &req));
    CHECK(fw_request_set_uniform_wind(req, 5.0, 0.0, 0.0));
    CHECK(fw_downscale(req, &res));

    size_t dims[3];
    CHECK(fw_result_dims(res, dims));
    size_t ncell = (dims[0] - 1) * (dims[1] - 1) * (dims[2] - 1);
    double *wind = malloc(3 * ncell * sizeof(double));
    CHECK(fw_result_wind(res, wind, 3 * ncell));

    size_t cycles;
    int converged;
    double rate;
    CHECK(fw_result_report(res, &cycles, &converged, &rate, NULL));
    printf("nodes %zux%zux%zu cycles %zu converged %d rate %.3f first-cell w %.6f\n", dims[0], dims[1],
           dims[2], cycles, converged, rate, wind[2]);

    free(wind);
    fw_result_free(res);
    fw_request_free(req);
    fw_terrain_free(terrain);
    return converged ? 0 : 2;
}
