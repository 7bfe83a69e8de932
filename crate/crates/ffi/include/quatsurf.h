#ifndef QUATSURF_H
#define QUATSURF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  QS_STATUS_INVALID_UTF8 = 2,
  QS_STATUS_OUT_OF_RANGE = 3,
  QS_STATUS_BUFFER_TOO_SMALL = 4,
  QS_STATUS_PANIC = 5,
  QS_STATUS_CONFIG_INVALID = 10,
  QS_STATUS_PROFILE_INVALID = 11,
  QS_STATUS_IO_ERROR = 12,
  QS_STATUS_SINGULAR = 20,
  QS_STATUS_DEGENERATE_SPECTRAL = 21,
  QS_STATUS_DEGENERATE_IMMERSION = 22,
  QS_STATUS_NOT_CLOSED = 23,
  QS_STATUS_ROUND_SPHERE = 24,
  QS_STATUS_STEP_TOO_COARSE = 25,
  QS_STATUS_DEFECTIVE_MONODROMY = 26,
  QS_STATUS_BLOWUP = 27,
  QS_STATUS_SINGULAR_EVERYWHERE = 28,
  QS_STATUS_NOT_INDEPENDENT = 29,
  QS_STATUS_SPLITTING_DEGENERATE = 30,
  QS_STATUS_DEPENDENT = 31,
  QS_STATUS_NOT_SMOOTH = 32,
  QS_STATUS_DEGENERATE_DENOMINATOR = 33,
} QsStatus;

// A projected quad mesh with per-vertex flags.
typedef struct QsMesh QsMesh;

// A validated run configuration with its surface and grid.
typedef struct QsScene QsScene;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failed call on this thread, or null if none
// failed yet. Valid until the next failure on this thread.
const char *qs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qs_version(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void qs_string_free(char *s);

// Parses and validates a JSON run configuration.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QsStatus qs_scene_from_json(const char *json, struct QsScene **out);

// Releases a scene. Null is ignored.
//
// # Safety
// `scene` must be null or a handle from [`qs_scene_from_json`], not yet freed.
void qs_scene_free(struct QsScene *scene);

// Hex SHA-256 of the canonical configuration (free with [`qs_string_free`]).
//
// # Safety
// `scene` must be a live handle; `out` must be writable.
enum QsStatus qs_scene_config_hash(const struct QsScene *scene, char **out);

// Number of steps in the configured transform pipeline (0 for a null scene).
//
// # Safety
// `scene` must be null or a live handle.
size_t qs_scene_step_count(const struct QsScene *scene);

// Mesh of the configured surface itself.
//
// # Safety
// `scene` must be a live handle; `out` must be writable.
enum QsStatus qs_scene_surface_mesh(const struct QsScene *scene, struct QsMesh **out);

// Runs pipeline step `index` on the configured surface. On success `*mesh`
// receives the transformed mesh and, when `diagnostics` is non-null, the step
// diagnostics as JSON.
//
// # Safety
// `scene` must be a live handle; `mesh` must be writable; `diagnostics` must
// be null or writable.
enum QsStatus qs_scene_run_step(const struct QsScene *scene,
                                size_t index,
                                struct QsMesh **mesh,
                                char **diagnostics);

// Multiplier sweep of the configured window as CSV text.
//
// # Safety
// `scene` must be a live handle; `out` must be writable.
enum QsStatus qs_scene_sweep_csv(const struct QsScene *scene, char **out);

// Invariant suite report as JSON. `scene` may be null for the defaults;
// `*passed` (if non-null) receives 1 when every check passed.
//
// # Safety
// `scene` must be null or a live handle; `out` must be writable; `passed`
// must be null or writable.
enum QsStatus qs_invariants_json(const struct QsScene *scene, char **out, int32_t *passed);

// Releases a mesh. Null is ignored.
//
// # Safety
// `mesh` must be null or a handle from this library, not yet freed.
void qs_mesh_free(struct QsMesh *mesh);

// Number of vertices (0 for a null mesh).
//
// # Safety
// `mesh` must be null or a live handle.
size_t qs_mesh_vertex_count(const struct QsMesh *mesh);

// Number of quad faces (0 for a null mesh).
//
// # Safety
// `mesh` must be null or a live handle.
size_t qs_mesh_face_count(const struct QsMesh *mesh);

// Copies `3 · vertex_count` coordinates (x, y, z per vertex) into `xyz`.
//
// # Safety
// `mesh` must be a live handle; `xyz` must hold `cap` doubles.
enum QsStatus qs_mesh_vertices(const struct QsMesh *mesh, double *xyz, size_t cap);

// Copies `4 · face_count` zero-based vertex indices into `quads`.
//
// # Safety
// `mesh` must be a live handle; `quads` must hold `cap` values.
enum QsStatus qs_mesh_faces(const struct QsMesh *mesh, size_t *quads, size_t cap);

// Copies one flag per vertex into `flags`: 0 regular, 1 singular, 2 branch point.
//
// # Safety
// `mesh` must be a live handle; `flags` must hold `cap` bytes.
enum QsStatus qs_mesh_flags(const struct QsMesh *mesh, uint8_t *flags, size_t cap);

// The mesh as OBJ text (free with [`qs_string_free`]).
//
// # Safety
// `mesh` must be a live handle; `out` must be writable.
enum QsStatus qs_mesh_to_obj(const struct QsMesh *mesh, char **out);

// The mesh as ASCII PLY text (free with [`qs_string_free`]).
//
// # Safety
// `mesh` must be a live handle; `out` must be writable.
enum QsStatus qs_mesh_to_ply(const struct QsMesh *mesh, char **out);

// The two harmonic parameters `μ₊, μ₋` over the isothermic parameter `ϱ`,
// written as `[re μ₊, im μ₊, re μ₋, im μ₋]`.
//
// # Safety
// `mu` must hold 4 doubles.
enum QsStatus qs_rho_to_mu(double rho_re, double rho_im, double *mu);

// The isothermic parameter `ϱ` of the harmonic parameter `μ`, written as `[re, im]`.
//
// # Safety
// `rho` must hold 2 doubles.
enum QsStatus qs_mu_to_rho(double mu_re, double mu_im, double *rho);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUATSURF_H */
