/* SPDX-License-Identifier: Apache-2.0 */

#ifndef QEVO_H
#define QEVO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum QevoStatus {
  QEVO_STATUS_OK = 0,
  QEVO_STATUS_NULL_POINTER = 1,
  QEVO_STATUS_INVALID_ARGUMENT = 2,
  QEVO_STATUS_BUFFER_TOO_SMALL = 3,
  QEVO_STATUS_CONFIG = 4,
  QEVO_STATUS_IO = 5,
  QEVO_STATUS_PARSE = 6,
  QEVO_STATUS_PANIC = 7,
} QevoStatus;

/**
 * Policy families accepted by [`qevo_policy_new`].
 */
typedef enum QevoArchitecture {
  QEVO_ARCHITECTURE_CART_POLE = 0,
  QEVO_ARCHITECTURE_TN_VQC = 1,
} QevoArchitecture;

/**
 * Opaque environment handle.
 */
typedef struct QevoEnv QevoEnv;

/**
 * Opaque policy handle.
 */
typedef struct QevoPolicy QevoPolicy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null.
 *
 * The pointer stays valid until the next library call on the same thread.
 */
const char *qevo_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be freed twice.
 */
void qevo_string_free(char *s);

/**
 * Number of parameters in a genome of the given architecture.
 *
 * # Safety
 * `out_len` must be a valid pointer.
 */
enum QevoStatus qevo_genome_len(enum QevoArchitecture kind, size_t bond_dim, size_t *out_len);

/**
 * Builds a policy from a flat parameter vector.
 *
 * # Safety
 * `values` must point to `len` doubles and `out` must be a valid pointer.
 */
enum QevoStatus qevo_policy_new(enum QevoArchitecture kind,
                                size_t bond_dim,
                                const double *values,
                                size_t len,
                                struct QevoPolicy **out);

/**
 * Builds a policy from genome JSON as written by `qevo train`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum QevoStatus qevo_policy_from_json(const char *json, struct QevoPolicy **out);

/**
 * Number of actions the policy chooses between.
 *
 * # Safety
 * `policy` must be a live handle or null.
 */
size_t qevo_policy_num_actions(const struct QevoPolicy *policy);

/**
 * Picks an action for one observation.
 *
 * # Safety
 * `policy` must be a live handle, `observation` must point to `len`
 * doubles and `out_action` must be a valid pointer.
 */
enum QevoStatus qevo_policy_act(const struct QevoPolicy *policy,
                                const double *observation,
                                size_t len,
                                size_t *out_action);

/**
 * Releases a policy. Null is ignored.
 *
 * # Safety
 * `policy` must come from this library and must not be freed twice.
 */
void qevo_policy_free(struct QevoPolicy *policy);

/**
 * Creates an environment by name: `cartpole`, `minigrid-5`, `minigrid-6`
 * or `minigrid-8`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum QevoStatus qevo_env_new(const char *name, struct QevoEnv **out);

/**
 * Length of the observation vector.
 *
 * # Safety
 * `env` must be a live handle or null.
 */
size_t qevo_env_observation_len(const struct QevoEnv *env);

/**
 * Number of valid actions.
 *
 * # Safety
 * `env` must be a live handle or null.
 */
size_t qevo_env_num_actions(const struct QevoEnv *env);

/**
 * Starts an episode and writes the first observation into `observation`.
 *
 * # Safety
 * `env` must be a live handle and `observation` must hold `capacity`
 * doubles.
 */
enum QevoStatus qevo_env_reset(struct QevoEnv *env,
                               uint64_t seed,
                               double *observation,
                               size_t capacity);

/**
 * Advances the environment by one action.
 *
 * # Safety
 * `env` must be a live handle, `observation` must hold `capacity` doubles
 * and `reward` and `done` must be valid pointers.
 */
enum QevoStatus qevo_env_step(struct QevoEnv *env,
                              size_t action,
                              double *observation,
                              size_t capacity,
                              double *reward,
                              bool *done);

/**
 * Releases an environment. Null is ignored.
 *
 * # Safety
 * `env` must come from this library and must not be freed twice.
 */
void qevo_env_free(struct QevoEnv *env);

/**
 * Amplitude-encodes non-negative `values` (length a power of two) and
 * writes the real and imaginary parts of the prepared state.
 *
 * # Safety
 * `values` must point to `len` doubles; `re` and `im` must each hold `len`
 * doubles.
 */
enum QevoStatus qevo_amplitude_encode(const double *values, size_t len, double *re, double *im);

/**
 * Scores a genome over `episodes` episodes and returns the report as JSON.
 *
 * # Safety
 * `genome_json` and `env_name` must be nul-terminated strings and
 * `out_json` a valid pointer. Free the result with [`qevo_string_free`].
 */
enum QevoStatus qevo_evaluate(const char *genome_json,
                              const char *env_name,
                              size_t episodes,
                              uint64_t seed,
                              char **out_json);

/**
 * Runs training from a JSON run config and returns the contents of the
 * written `stats.csv`.
 *
 * # Safety
 * `config_json` must be a nul-terminated string and `out_csv` a valid
 * pointer. Free the result with [`qevo_string_free`].
 */
enum QevoStatus qevo_train(const char *config_json, char **out_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEVO_H */
