#ifndef SRMIN_H
#define SRMIN_H

/* C interface to the sub-Riemannian minimal-surface library. All entry
 * points are thread-safe; the error message is thread-local. Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with srmin_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRMIN_API __declspec(dllexport)
#else
#define SRMIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srmin_status {
  SRMIN_OK = 0,
  SRMIN_ERR_INVALID_ARGUMENT = 1, /* bad handle, null pointer, bad value */
  SRMIN_ERR_CONFIG = 2,           /* config violates the schema or misses a block */
  SRMIN_ERR_PARSE = 3,            /* expression syntax error */
  SRMIN_ERR_EVAL = 4,             /* expression domain violation */
  SRMIN_ERR_NUMERIC = 5,          /* degenerate frame, failed verification */
  SRMIN_ERR_IO = 6,               /* filesystem failure */
  SRMIN_ERR_INTERNAL = 7
} srmin_status;

/* Stable lowercase tag for a status ("ok", "config", "numeric", ...). */
SRMIN_API const char* srmin_status_name(srmin_status status);

SRMIN_API const char* srmin_version(void);

/* Message of the last failure on this thread; empty string when the last
 * call succeeded. Valid until the next library call on the same thread. */
SRMIN_API const char* srmin_last_error(void);

SRMIN_API void srmin_string_free(char* s);

/* A parsed and validated run configuration (structure, optional surface,
 * sweep, geodesic, and search-box blocks). */
typedef struct srmin_config srmin_config;

SRMIN_API srmin_status srmin_config_parse(const char* json_text, srmin_config** out);
SRMIN_API srmin_status srmin_config_load(const char* path, srmin_config** out);
SRMIN_API void srmin_config_free(srmin_config* config);

/* Effective config: defaults materialized, byte-stable, re-parseable. */
SRMIN_API srmin_status srmin_config_effective_json(const srmin_config* config,
                                                   char** json_out);

/* Output directory recorded in the config. The setter folds a caller-side
 * override into the handle, so the effective JSON echoes it. */
SRMIN_API srmin_status srmin_config_output_dir(const srmin_config* config, char** out);
SRMIN_API srmin_status srmin_config_set_output_dir(srmin_config* config, const char* dir);

/* Chart, frame, one-form, Reeb field, and structural constants at the
 * reference point, as JSON. */
SRMIN_API srmin_status srmin_run_structure(const srmin_config* config, char** json_out);

/* Curvature residual at `samples` seeded points of the surface block's
 * level set inside the search box (samples = 0 picks 200). Needs the
 * surface and search_box blocks. */
SRMIN_API srmin_status srmin_run_residual(const srmin_config* config, uint64_t seed,
                                          size_t samples, char** json_out);

/* Characteristic points of the surface block's level set inside the
 * search box, classified. Needs the surface and search_box blocks. */
SRMIN_API srmin_status srmin_run_charpoints(const srmin_config* config, char** json_out);

/* Integrate the sweep block into a ruled surface patch. Either output may
 * be NULL to skip it: obj_out receives a Wavefront OBJ quad mesh, csv_out
 * the per-vertex table with the ruling angle. */
SRMIN_API srmin_status srmin_run_sweep(const srmin_config* config, char** obj_out,
                                       char** csv_out);

/* Integrate the geodesic block; CSV of (t, q, psi, u3) per node. */
SRMIN_API srmin_status srmin_run_geodesic(const srmin_config* config, char** csv_out);

/* Group case of the structure with the closed-form geodesic angles. The
 * seed drives the constant-tensor verification. */
SRMIN_API srmin_status srmin_run_classify(const srmin_config* config, uint64_t seed,
                                          char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SRMIN_H */
