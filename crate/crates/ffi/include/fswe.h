#ifndef FSWE_H
#define FSWE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FsweStatus {
  FSWE_STATUS_OK = 0,
  FSWE_STATUS_NULL_POINTER = 1,
  FSWE_STATUS_INVALID_ARGUMENT = 2,
  FSWE_STATUS_INVALID_CONFIG = 3,
  /**
   * Covariance factorisation failed or the solution left the finite range.
   */
  FSWE_STATUS_NUMERICAL = 4,
  /**
   * Caller buffer has the wrong length.
   */
  FSWE_STATUS_BUFFER_SIZE = 5,
  /**
   * Internal panic; the handle arguments are unchanged.
   */
  FSWE_STATUS_PANIC = 6,
} FsweStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct FsweConfig FsweConfig;

/**
 * Opaque strong-error table.
 */
typedef struct FsweErrorTable FsweErrorTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fswe_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t fswe_last_error_message(char *buf, size_t len);

/**
 * E[B(s)B(t)] for fractional Brownian motion with Hurst index `h`.
 *
 * # Safety
 * `out` must be null or a valid pointer.
 */
enum FsweStatus fswe_fbm_covariance(double s, double t, double h, double *out);

/**
 * Regularity label κ and predicted strong rate for (α, H, σ).
 *
 * # Safety
 * `kappa` and `rate` must be valid pointers.
 */
enum FsweStatus fswe_kappa_label(double alpha,
                                 double hurst,
                                 double sigma,
                                 double *kappa,
                                 double *rate);

/**
 * Parses `key = value` configuration text into a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsweStatus fswe_config_parse(const char *text, struct FsweConfig **out);

/**
 * Reference problem: T = 0.2, steps 4..32, u0 = 0.25 φ1, v0 = 0.5 φ3 and the
 * default drift, with mode count and trajectory count given explicitly.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FsweStatus fswe_config_reference(double alpha,
                                      double hurst,
                                      double sigma,
                                      size_t modes,
                                      size_t trajectories,
                                      struct FsweConfig **out);

/**
 * Overrides the base seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum FsweStatus fswe_config_set_seed(struct FsweConfig *config, uint64_t seed);

/**
 * Sets the worker count; 0 means one per core. Results do not depend on it.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum FsweStatus fswe_config_set_workers(struct FsweConfig *config, size_t workers);

/**
 * Number of spectral modes in the configuration.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum FsweStatus fswe_config_modes(const struct FsweConfig *config, size_t *out);

/**
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void fswe_config_free(struct FsweConfig *config);

/**
 * Runs the Monte Carlo strong-error estimate for `config`.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum FsweStatus fswe_strong_errors(const struct FsweConfig *config, struct FsweErrorTable **out);

/**
 * Number of rows (every level except the finest).
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum FsweStatus fswe_table_len(const struct FsweErrorTable *table, size_t *out);

/**
 * Row `index`: step count, RMS error, its jackknife standard error and the
 * observed rate against the previous row (NaN for the first row).
 *
 * # Safety
 * `table` must be a live handle; the out pointers must be valid.
 */
enum FsweStatus fswe_table_row(const struct FsweErrorTable *table,
                               size_t index,
                               size_t *steps,
                               double *error,
                               double *stderr,
                               double *rate);

/**
 * # Safety
 * `table` must be null or a handle from this library not yet freed.
 */
void fswe_table_free(struct FsweErrorTable *table);

/**
 * Solves one trajectory at the finest step count and writes the modal
 * coefficients of u(T) into `u_out`, which must hold exactly `modes` values.
 *
 * # Safety
 * `config` must be a live handle and `u_out` valid for `len` doubles.
 */
enum FsweStatus fswe_solve_final(const struct FsweConfig *config,
                                 size_t trajectory,
                                 double *u_out,
                                 size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FSWE_H */
