#ifndef HELIX_SE3_H
#define HELIX_SE3_H

/* Generated by cbindgen from helix-se3-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsCommand {
  HS_COMMAND_LANDSCAPE = 0,
  HS_COMMAND_MINIMA = 1,
  HS_COMMAND_DISPERSION = 2,
  HS_COMMAND_STABILITY_SCAN = 3,
  HS_COMMAND_TWIST_CHECK = 4,
  HS_COMMAND_TWO_HELIX = 5,
} HsCommand;

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_CONFIG_ERROR = 2,
  HS_STATUS_NUMERICAL_ERROR = 3,
  HS_STATUS_ORACLE_FAILURE = 4,
  HS_STATUS_NULL_ARGUMENT = 10,
  HS_STATUS_INVALID_UTF8 = 11,
  HS_STATUS_OUT_OF_RANGE = 12,
  HS_STATUS_NOT_NUMERIC = 13,
  HS_STATUS_PANIC = 14,
} HsStatus;

/**
 * A parsed run configuration.
 */
typedef struct HsConfig HsConfig;

/**
 * A result table with its rendered CSV text.
 */
typedef struct HsTable HsTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *hs_last_error(void);

/**
 * Parses configuration text into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HsStatus hs_config_parse(const char *text, struct HsConfig **out);

/**
 * # Safety
 * `cfg` must come from [`hs_config_parse`] and not be freed already; null is ignored.
 */
void hs_config_free(struct HsConfig *cfg);

/**
 * Runs `command`. On success, and on oracle or strict-mode failures that still
 * produce a table, `*out` receives a table handle; otherwise it is set to null.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum HsStatus hs_run(const struct HsConfig *cfg, enum HsCommand command, struct HsTable **out);

/**
 * # Safety
 * `table` must come from [`hs_run`] and not be freed already; null is ignored.
 */
void hs_table_free(struct HsTable *table);

/**
 * CSV text of the table, owned by the handle.
 *
 * # Safety
 * `table` must be a live table handle or null.
 */
const char *hs_table_csv(const struct HsTable *table);

/**
 * # Safety
 * `table` must be a live table handle or null.
 */
uintptr_t hs_table_rows(const struct HsTable *table);

/**
 * # Safety
 * `table` must be a live table handle or null.
 */
uintptr_t hs_table_columns(const struct HsTable *table);

/**
 * Numeric cell at `(row, column)`; text cells such as `inf` markers are
 * reported as [`HsStatus::NotNumeric`].
 *
 * # Safety
 * `table` must be a live table handle and `out` a valid pointer.
 */
enum HsStatus hs_table_value(const struct HsTable *table,
                             uintptr_t row,
                             uintptr_t column,
                             double *out);

/**
 * Debye length in Å for ionic strength `i` (mol/l), permittivity `eps_r`, temperature `t` (K).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HsStatus hs_debye_length(double i, double eps_r, double t, double *out);

/**
 * Generalized eigenvalues of the stability matrix at wavenumber `k`, ascending, into `out[0..6]`.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` point to six writable doubles.
 */
enum HsStatus hs_dispersion_at(const struct HsConfig *cfg, double k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELIX_SE3_H */
