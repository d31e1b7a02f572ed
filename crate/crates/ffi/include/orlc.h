#ifndef ORLC_H
#define ORLC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum OrlcStatus {
  ORLC_STATUS_OK = 0,
  ORLC_STATUS_NULL_POINTER = 1,
  ORLC_STATUS_INVALID_ARGUMENT = 2,
  ORLC_STATUS_INVALID_MDP = 3,
  ORLC_STATUS_INFEASIBLE_BOX = 4,
  ORLC_STATUS_PARSE_ERROR = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  ORLC_STATUS_INTERNAL = 6,
} OrlcStatus;

/**
 * Tabular MDP.
 */
typedef struct OrlcMdp OrlcMdp;

/**
 * ORLC learner bound to a tabular MDP.
 */
typedef struct OrlcRunner OrlcRunner;

/**
 * ORLC-SI learner bound to a contextual MDP.
 */
typedef struct OrlcSiRunner OrlcSiRunner;

/**
 * Announced return interval and optimality certificate.
 */
typedef struct OrlcCertificate {
  double epsilon;
  double lo;
  double hi;
} OrlcCertificate;

/**
 * One played and audited episode.
 */
typedef struct OrlcEpisode {
  uint64_t episode;
  struct OrlcCertificate certificate;
  double realized_reward;
  double policy_return;
  double optimal_return;
  double gap;
  /**
   * Nonzero when the certificate failed the audit.
   */
  uint8_t violation;
} OrlcEpisode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 */
size_t orlc_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *orlc_version(void);

/**
 * Build an MDP from dense tables: `transitions[(s*A + a)*S + s']` and
 * `rewards[s*A + a]` (mean rewards in [0,1], Bernoulli noise). Start state 0.
 */
enum OrlcStatus orlc_mdp_from_tables(size_t states,
                                     size_t actions,
                                     size_t horizon,
                                     const double *transitions,
                                     const double *rewards,
                                     struct OrlcMdp **out);

/**
 * Seeded random sparse-reward MDP.
 */
enum OrlcStatus orlc_mdp_random_tabular(size_t states,
                                        size_t actions,
                                        size_t horizon,
                                        uint64_t seed,
                                        struct OrlcMdp **out);

/**
 * Load a tabular MDP from an instance JSON document.
 */
enum OrlcStatus orlc_mdp_from_json(const char *json, struct OrlcMdp **out);

enum OrlcStatus orlc_mdp_dims(const struct OrlcMdp *mdp,
                              size_t *states,
                              size_t *actions,
                              size_t *horizon);

/**
 * Optimal expected return from the start state.
 */
enum OrlcStatus orlc_mdp_optimal_return(const struct OrlcMdp *mdp, double *out);

void orlc_mdp_free(struct OrlcMdp *mdp);

/**
 * ORLC learner on a copy of `mdp`. `refined_bonus` selects the refined
 * widths (nonzero) or the simple ones (zero).
 */
enum OrlcStatus orlc_runner_new(const struct OrlcMdp *mdp,
                                double delta,
                                uint8_t refined_bonus,
                                uint64_t seed,
                                struct OrlcRunner **out);

/**
 * Plan, announce, play and audit one episode.
 */
enum OrlcStatus orlc_runner_next_episode(struct OrlcRunner *runner, struct OrlcEpisode *out);

/**
 * Serialize the learner state as JSON into `buf` (NUL-terminated). Returns
 * the needed length excluding the NUL in `needed`; call with a null buffer
 * to size it.
 */
enum OrlcStatus orlc_runner_checkpoint_json(const struct OrlcRunner *runner,
                                            char *buf,
                                            size_t len,
                                            size_t *needed);

void orlc_runner_free(struct OrlcRunner *runner);

/**
 * ORLC-SI learner on a contextual instance document. `mass_constrained`
 * selects the box-constrained planner (nonzero) or the plain one (zero).
 */
enum OrlcStatus orlc_si_runner_from_json(const char *json,
                                         double delta,
                                         double lambda,
                                         uint8_t mass_constrained,
                                         uint64_t seed,
                                         struct OrlcSiRunner **out);

enum OrlcStatus orlc_si_runner_next_episode(struct OrlcSiRunner *runner, struct OrlcEpisode *out);

void orlc_si_runner_free(struct OrlcSiRunner *runner);

/**
 * Largest `p . v` over distributions within `psi` of `p_hat` per coordinate.
 */
enum OrlcStatus orlc_prob_est_norm(const double *p_hat,
                                   const double *v,
                                   size_t n,
                                   double psi,
                                   double *out);

/**
 * Confidence scalar for `n` visits; `main_text_variant` nonzero selects the
 * main-text constants instead of the default ones.
 */
enum OrlcStatus orlc_phi(uint64_t n,
                         size_t states,
                         size_t actions,
                         size_t horizon,
                         double delta,
                         uint8_t main_text_variant,
                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLC_H */
