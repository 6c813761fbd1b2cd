#ifndef QDM_H
#define QDM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Report selector for `qdm_model_run`.
typedef enum QdmCommand {
  QDM_COMMAND_ANALYZE = 0,
  QDM_COMMAND_FUSE = 1,
  QDM_COMMAND_CONFINE = 2,
  QDM_COMMAND_GLUE = 3,
} QdmCommand;

// Result of every fallible call. The nonzero values match the exit codes
// of the command-line tool, plus one for bad arguments.
typedef enum QdmStatus {
  QDM_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  QDM_STATUS_INVALID_ARGUMENT = 1,
  QDM_STATUS_CONFIG = 2,
  QDM_STATUS_DIMENSION_CAP = 3,
  QDM_STATUS_INTERNAL = 4,
  QDM_STATUS_FUSION = 5,
  QDM_STATUS_PATH_UNAVAILABLE = 6,
} QdmStatus;

// Opaque model handle.
typedef struct QdmModel QdmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON config. Relative `w_file` paths resolve against the
// working directory. On success `*out` owns a new model.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum QdmStatus qdm_model_from_json(const char *json, struct QdmModel **out);

// Loads a JSON config file. Relative `w_file` paths resolve against the
// file's directory.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
enum QdmStatus qdm_model_from_file(const char *path, struct QdmModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from `qdm_model_from_json` or `qdm_model_from_file`
// and must not be used afterwards.
void qdm_model_free(struct QdmModel *model);

// Hilbert space dimension.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum QdmStatus qdm_model_dimension(const struct QdmModel *model, uint64_t *out);

// Number of orbits of the matter action.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum QdmStatus qdm_model_d_alg(const struct QdmModel *model, uint64_t *out);

// Exact ground state degeneracy, honouring the config's exclusions.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum QdmStatus qdm_model_ground_degeneracy(const struct QdmModel *model, uint64_t *out);

// Produces the same report as the command-line tool: JSON for analyze,
// fuse and glue, CSV for confine. A `dense_cap` of 0 keeps the config's
// value. On success `*out` owns a string for `qdm_string_free`.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum QdmStatus qdm_model_run(const struct QdmModel *model,
                             enum QdmCommand command,
                             uint64_t seed,
                             size_t dense_cap,
                             char **out);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and must not be used afterwards.
void qdm_string_free(char *s);

// Message for the last failure on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *qdm_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDM_H */
