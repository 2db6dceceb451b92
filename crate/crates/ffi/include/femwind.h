#ifndef FEMWIND_H
#define FEMWIND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Synthetic terrain shapes for [`fw_terrain_synthetic`].
 */
#define FW_TERRAIN_FLAT 0

#define FW_TERRAIN_HILL 1

#define FW_TERRAIN_RIDGE 2

/**
 * Result code of every fallible call.
 */
typedef enum FwStatus {
  FW_STATUS_OK = 0,
  FW_STATUS_NULL_POINTER = 1,
  FW_STATUS_INVALID_ARGUMENT = 2,
  FW_STATUS_DIMENSION_MISMATCH = 3,
  FW_STATUS_UNSUPPORTED = 4,
  FW_STATUS_INVALID_MESH = 5,
  FW_STATUS_DIVERGED = 6,
  FW_STATUS_IO = 7,
  FW_STATUS_PARSE = 8,
  FW_STATUS_INTERNAL = 9,
  FW_STATUS_PANIC = 10,
} FwStatus;

/**
 * Downscaling inputs; defaults to zero uniform wind, unit penalty and the
 * default solver settings.
 */
typedef struct FwRequest FwRequest;

/**
 * Adjusted wind, multiplier and solve report.
 */
typedef struct FwResult FwResult;

/**
 * Ground elevation grid.
 */
typedef struct FwTerrain FwTerrain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *fw_last_error(void);

/**
 * Static description of a status code.
 */
const char *fw_status_string(enum FwStatus status);

/**
 * Synthetic terrain (`FW_TERRAIN_*`) with the lower-left node at the origin. `amplitude` and
 * `width` are ignored for flat terrain; hills and ridges are centered.
 */
enum FwStatus fw_terrain_synthetic(int kind,
                                   size_t n1,
                                   size_t n2,
                                   double d1,
                                   double d2,
                                   double amplitude,
                                   double width,
                                   struct FwTerrain **out);

/**
 * Terrain from `n1 * n2` node elevations, `i` fastest.
 */
enum FwStatus fw_terrain_from_elevations(size_t n1,
                                         size_t n2,
                                         double d1,
                                         double d2,
                                         double x0,
                                         double y0,
                                         const double *elevation,
                                         size_t len,
                                         struct FwTerrain **out);

/**
 * Terrain from an ESRI ASCII grid file.
 */
enum FwStatus fw_terrain_read_ascii_grid(const char *path, struct FwTerrain **out);

enum FwStatus fw_terrain_dims(const struct FwTerrain *terrain, size_t *n1, size_t *n2);

void fw_terrain_free(struct FwTerrain *terrain);

/**
 * New request over a copy of `terrain` with `n3` layers stretched by
 * `stretch_ratio` up to `top_height` above the lowest ground point.
 */
enum FwStatus fw_request_new(const struct FwTerrain *terrain,
                             size_t n3,
                             double top_height,
                             double stretch_ratio,
                             struct FwRequest **out);

enum FwStatus fw_request_set_penalty(struct FwRequest *req, double a1, double a2, double a3);

enum FwStatus fw_request_set_uniform_wind(struct FwRequest *req, double u, double v, double w);

/**
 * Log-law horizontal wind; `direction` is the heading in degrees
 * counterclockwise from `+x`.
 */
enum FwStatus fw_request_set_log_wind(struct FwRequest *req,
                                      double speed,
                                      double direction,
                                      double roughness_length,
                                      double reference_height);

/**
 * Cell-center wind, `3 * cells` values interleaved `u v w`, `i` fastest.
 */
enum FwStatus fw_request_set_cell_wind(struct FwRequest *req, const double *uvw, size_t len);

enum FwStatus fw_request_set_solver(struct FwRequest *req,
                                    size_t pre_smooth,
                                    size_t post_smooth,
                                    size_t max_cycles,
                                    double rel_tol);

/**
 * Start the next solve from `lambda` (one value per node), or clear the warm
 * start when `lambda` is null.
 */
enum FwStatus fw_request_set_warm_start(struct FwRequest *req, const double *lambda, size_t len);

void fw_request_free(struct FwRequest *req);

/**
 * Run the downscaling. On [`FwStatus::Diverged`] no result is produced.
 */
enum FwStatus fw_downscale(const struct FwRequest *req, struct FwResult **out);

/**
 * Node counts; cells are one fewer in each direction.
 */
enum FwStatus fw_result_dims(const struct FwResult *res, size_t *dims);

/**
 * Copy the adjusted wind (`3 * cells` values) into `out`.
 */
enum FwStatus fw_result_wind(const struct FwResult *res, double *out, size_t len);

/**
 * Copy the multiplier (one value per node) into `out`.
 */
enum FwStatus fw_result_lambda(const struct FwResult *res, double *out, size_t len);

/**
 * Solve summary: cycles run, convergence flag (0/1), rate and final
 * relative residual. Any output pointer may be null.
 */
enum FwStatus fw_result_report(const struct FwResult *res,
                               size_t *cycles,
                               int *converged,
                               double *rate,
                               double *final_residual);

/**
 * Legacy VTK file with the mesh, `lambda` and the adjusted wind.
 */
enum FwStatus fw_result_write_vtk(const struct FwResult *res, const char *path);

void fw_result_free(struct FwResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEMWIND_H */
