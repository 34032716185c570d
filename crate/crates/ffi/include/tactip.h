#ifndef TACTIP_H
#define TACTIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum TactipStatus {
  TactipStatus_Ok = 0,
  /**
   * Bad argument: null pointer, wrong size, out-of-range value.
   */
  TactipStatus_Parameter = 1,
  /**
   * Malformed data or file contents.
   */
  TactipStatus_Data = 2,
  /**
   * Filesystem failure.
   */
  TactipStatus_Io = 3,
  TactipStatus_Internal = 4,
} TactipStatus;

/**
 * Opaque accumulating contact grid.
 */
typedef struct TactipForceGrid TactipForceGrid;

/**
 * Opaque fixed-count marker localizer.
 */
typedef struct TactipMarkerModel TactipMarkerModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Valid until the
 * next failing call; never null.
 */
const char *tactip_last_error(void);

/**
 * Adaptive mean threshold. `out_bits` receives width*height bytes of
 * 0/1. `window` must be odd and fit inside the frame.
 *
 * # Safety
 * `pixels` and `out_bits` must each point to width*height bytes.
 */
enum TactipStatus tactip_threshold(const uint8_t *pixels,
                                   uint32_t width,
                                   uint32_t height,
                                   uint32_t window,
                                   double offset,
                                   uint8_t *out_bits);

/**
 * Clears connected foreground components larger than `max_area` pixels,
 * in place.
 *
 * # Safety
 * `bits` must point to width*height bytes.
 */
enum TactipStatus tactip_remove_large_blobs(uint8_t *bits,
                                            uint32_t width,
                                            uint32_t height,
                                            uintptr_t max_area);

/**
 * Extracts blob centroids (area >= `min_area`) as x,y pairs.
 * `out_xy` holds up to `capacity` pairs; `out_count` receives how many
 * were written. Fails with `Data` if capacity is too small.
 *
 * # Safety
 * `bits` must point to width*height bytes, `out_xy` to 2*capacity f64,
 * `out_count` to one usize.
 */
enum TactipStatus tactip_centroids(const uint8_t *bits,
                                   uint32_t width,
                                   uint32_t height,
                                   uintptr_t min_area,
                                   double *out_xy,
                                   uintptr_t capacity,
                                   uintptr_t *out_count);

/**
 * Creates a grid over the reference frame. Returns null on failure
 * (see `tactip_last_error`).
 *
 * # Safety
 * `pixels` must point to width*height bytes.
 */
struct TactipForceGrid *tactip_force_grid_new(const uint8_t *pixels,
                                              uint32_t width,
                                              uint32_t height,
                                              uint32_t grid_size,
                                              double gamma);

/**
 * Feeds the next frame into the grid.
 *
 * # Safety
 * `grid` must come from `tactip_force_grid_new` and not be freed;
 * `pixels` must point to width*height bytes matching the grid's frame.
 */
enum TactipStatus tactip_force_grid_update(struct TactipForceGrid *grid,
                                           const uint8_t *pixels,
                                           uint32_t width,
                                           uint32_t height);

/**
 * Reads total activation and whether it crosses `threshold`.
 *
 * # Safety
 * All pointers must be valid; `grid` must come from
 * `tactip_force_grid_new`.
 */
enum TactipStatus tactip_force_grid_contact(const struct TactipForceGrid *grid,
                                            double threshold,
                                            int32_t *out_contact,
                                            double *out_total);

/**
 * # Safety
 * `grid` must come from `tactip_force_grid_new` and not be freed twice.
 */
void tactip_force_grid_free(struct TactipForceGrid *grid);

/**
 * Loads a trained marker model from disk; null on failure.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
struct TactipMarkerModel *tactip_marker_model_load(const char *path);

/**
 * Number of markers the model always reports.
 *
 * # Safety
 * `model` must come from `tactip_marker_model_load`.
 */
uintptr_t tactip_marker_model_count(const struct TactipMarkerModel *model);

/**
 * Predicts all marker positions from a binary frame. `out_xy` must hold
 * 2 * marker_count doubles.
 *
 * # Safety
 * `model` must come from `tactip_marker_model_load`; `bits` must point
 * to width*height bytes; `out_xy` to 2*marker_count f64.
 */
enum TactipStatus tactip_marker_model_predict(const struct TactipMarkerModel *model,
                                              const uint8_t *bits,
                                              uint32_t width,
                                              uint32_t height,
                                              double *out_xy);

/**
 * # Safety
 * `model` must come from `tactip_marker_model_load` and not be freed
 * twice.
 */
void tactip_marker_model_free(struct TactipMarkerModel *model);

/**
 * Runs a stimulus script with the default sensor (glare spot included)
 * and writes the rendered frames to `out_path` as a frame container.
 *
 * # Safety
 * Both paths must be valid NUL-terminated strings.
 */
enum TactipStatus tactip_simulate_to_file(const char *script_path,
                                          const char *out_path,
                                          uint64_t seed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TACTIP_H */
