#ifndef BCSI_H
#define BCSI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum BcsiStatus {
  BCSI_STATUS_OK = 0,
  BCSI_STATUS_MALFORMED = 1,
  BCSI_STATUS_GUARD = 2,
  BCSI_STATUS_INTERNAL = 3,
  BCSI_STATUS_INVALID_ARGUMENT = 4,
  BCSI_STATUS_ALPHABET_MISMATCH = 5,
  BCSI_STATUS_NULL_POINTER = 6,
} BcsiStatus;

/**
 * A broadcast channel `p(y1, y2 | x)`.
 */
typedef struct BcsiChannel BcsiChannel;

/**
 * A rate region over `R1..R5`.
 */
typedef struct BcsiRegion BcsiRegion;

/**
 * An auxiliary scheme `p(u0, u1, u2)` with its map to the input.
 */
typedef struct BcsiScheme BcsiScheme;

/**
 * The five mutual informations of a scheme, in bits.
 */
typedef struct BcsiMiConstants {
  /**
   * `I(U0, U1; Y1)`
   */
  double i_u0u1_y1;
  /**
   * `I(U0, U2; Y2)`
   */
  double i_u0u2_y2;
  /**
   * `I(U1; Y1 | U0)`
   */
  double i_u1_y1_given_u0;
  /**
   * `I(U2; Y2 | U0)`
   */
  double i_u2_y2_given_u0;
  /**
   * `I(U1; U2 | U0)`
   */
  double i_u1_u2_given_u0;
} BcsiMiConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *bcsi_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bcsi_string_free(char *s);

/**
 * Parses a channel file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BcsiStatus bcsi_channel_from_json(const char *json, struct BcsiChannel **out);

/**
 * # Safety
 * `ch` must come from [`bcsi_channel_from_json`] or be null.
 */
void bcsi_channel_free(struct BcsiChannel *ch);

/**
 * Parses a scheme file's JSON text against the channel's input size.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_scheme_from_json(const char *json,
                                      const struct BcsiChannel *ch,
                                      struct BcsiScheme **out);

/**
 * # Safety
 * `s` must come from [`bcsi_scheme_from_json`] or be null.
 */
void bcsi_scheme_free(struct BcsiScheme *s);

/**
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_mi_constants(const struct BcsiScheme *scheme,
                                  const struct BcsiChannel *ch,
                                  struct BcsiMiConstants *out);

/**
 * The five inner-bound inequalities at one scheme.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_theorem1_region(const struct BcsiScheme *scheme,
                                     const struct BcsiChannel *ch,
                                     struct BcsiRegion **out);

/**
 * The raw coding conditions projected onto `R1..R5` by elimination.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_raw_projection(const struct BcsiScheme *scheme,
                                    const struct BcsiChannel *ch,
                                    struct BcsiRegion **out);

/**
 * Parses a region file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BcsiStatus bcsi_region_from_json(const char *json, struct BcsiRegion **out);

/**
 * Region as JSON text; free with [`bcsi_string_free`].
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_region_to_json(const struct BcsiRegion *region, char **out);

/**
 * # Safety
 * `r` must come from this library or be null.
 */
void bcsi_region_free(struct BcsiRegion *r);

/**
 * Whether `rates[0..5]` lies in the region, nonnegativity included.
 *
 * # Safety
 * `rates` must point to five doubles; `out` must be writable.
 */
enum BcsiStatus bcsi_region_contains(const struct BcsiRegion *region,
                                     const double *rates,
                                     bool *out);

/**
 * Mutual containment inside the default rate box.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_regions_equal(const struct BcsiRegion *a,
                                   const struct BcsiRegion *b,
                                   bool *out);

/**
 * All four class verdicts as a JSON array.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_classify_json(const struct BcsiChannel *ch, char **out);

/**
 * Runs the coding simulation. `config_json` holds `rates` (five
 * numbers), `n`, `trials`, and optionally `seed` (default 0) and `eps`
 * (default 0.3). The report is written as JSON.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum BcsiStatus bcsi_simulate_json(const struct BcsiChannel *ch,
                                   const struct BcsiScheme *scheme,
                                   const char *config_json,
                                   char **out);

/**
 * Library version string; static, do not free.
 */
const char *bcsi_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BCSI_H */
