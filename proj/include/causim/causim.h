#ifndef CAUSIM_H
#define CAUSIM_H

/* C interface to the causal-imitation library. Every function returns a
 * status code; on failure causim_last_error() describes what went wrong for
 * the calling thread. Out-parameters are written only on CAUSIM_OK. Handles
 * are freed with their matching _destroy function; destroy accepts NULL. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum causim_status {
  CAUSIM_OK = 0,
  CAUSIM_INVALID_ARGUMENT = 1,
  CAUSIM_CONFIG_ERROR = 2,
  CAUSIM_IO_ERROR = 3,
  CAUSIM_NUMERIC_ERROR = 4,
  CAUSIM_RUNTIME_ERROR = 5
} causim_status;

typedef struct causim_scenario causim_scenario;
typedef struct causim_demos causim_demos;
typedef struct causim_policy causim_policy;
typedef struct causim_graph_policy causim_graph_policy;

const char* causim_version(void);
/* Thread-local message for the most recent failure; empty after success. */
const char* causim_last_error(void);

/* Scenario kinds: "original", "confounded", "confounded_entangled". */
causim_status causim_scenario_create(const char* kind, uint64_t seed, causim_scenario** out);
causim_status causim_scenario_save(const causim_scenario* sc, const char* path);
causim_status causim_scenario_load(const char* path, causim_scenario** out);
/* Bit string over observation dims marking true causes ("110"); empty for
 * the entangled kind. buf_len counts the terminating NUL. */
causim_status causim_scenario_true_mask(const causim_scenario* sc, char* buf, size_t buf_len);
void causim_scenario_destroy(causim_scenario* sc);

causim_status causim_demos_collect(const causim_scenario* sc, int min_transitions, uint64_t seed,
                                   causim_demos** out);
causim_status causim_demos_save(const causim_demos* demos, const char* path);
causim_status causim_demos_load(const char* path, causim_demos** out);
int causim_demos_count(const causim_demos* demos);
/* Copy of the scenario the demonstrations were collected under. */
causim_status causim_demos_scenario(const causim_demos* demos, causim_scenario** out);
void causim_demos_destroy(causim_demos* demos);

/* Zero-initialize, then override the fields you need; zero or negative
 * numeric fields fall back to the library defaults. */
typedef struct causim_train_options {
  int epochs;           /* default 50 */
  int batch_size;       /* default 128 */
  double learning_rate; /* default 1e-3 */
  double val_fraction;  /* default 0.1 */
  uint64_t seed;
} causim_train_options;

causim_status causim_train_bc(const causim_demos* demos, const causim_train_options* opt,
                              causim_policy** out);
causim_status causim_policy_eval(const causim_policy* policy, const causim_scenario* sc,
                                 int episodes, uint64_t seed, double* mean_return);
causim_status causim_policy_save(const causim_policy* policy, const char* path);
causim_status causim_policy_load(const char* path, causim_policy** out);
void causim_policy_destroy(causim_policy* policy);

causim_status causim_train_graph_policy(const causim_demos* demos,
                                        const causim_train_options* opt,
                                        causim_graph_policy** out);
/* mask_bits: e.g. "110" selects the first two observation dims. */
causim_status causim_graph_policy_eval(const causim_graph_policy* gp, const char* mask_bits,
                                       const causim_scenario* sc, int episodes, uint64_t seed,
                                       double* mean_return);
causim_status causim_graph_policy_save(const causim_graph_policy* gp, const char* path);
causim_status causim_graph_policy_load(const char* path, causim_graph_policy** out);
void causim_graph_policy_destroy(causim_graph_policy* gp);

typedef struct causim_intervention_options {
  double ridge;        /* default 1e-3 */
  double tau_start;    /* default 1.0 */
  double tau_end;      /* default 0.1 */
  int collect_episodes; /* default 10 */
  int graph_samples;   /* default 60 */
} causim_intervention_options;

/* Runs the policy-execution intervention and writes the per-episode trace to
 * trace_path (pass NULL to skip). The inferred mask lands in mode_buf. */
causim_status causim_intervene_exec(const causim_graph_policy* gp, const causim_scenario* sc,
                                    int episodes, uint64_t seed,
                                    const causim_intervention_options* opt,
                                    const char* trace_path, char* mode_buf, size_t mode_buf_len);
/* Expert-query intervention under a query budget; reports queries spent. */
causim_status causim_intervene_query(const causim_graph_policy* gp, const causim_scenario* sc,
                                     int budget, uint64_t seed,
                                     const causim_intervention_options* opt,
                                     const char* trace_path, char* mode_buf, size_t mode_buf_len,
                                     int* queries_used);

/* Marginal and conditional dependence table from demonstrations, written as
 * CSV. samples <= 0 uses every paired sample. */
causim_status causim_mi_report(const causim_demos* demos, int samples, int neighbors,
                               const char* csv_path);

typedef struct causim_variational_options {
  int latent_dim;        /* default 4 */
  int steps;             /* default 3000 */
  int batch_size;        /* default 64 */
  double learning_rate;  /* default 1e-3 */
  double prior_strength; /* default 0.1; pass a negative value for 0 */
  double gumbel_tau;     /* default 1.0 */
  uint64_t seed;
} causim_variational_options;

/* Trains the variational graph posterior, saves a checkpoint when ckpt_path
 * is non-NULL, and writes the per-dim posterior marginals into q. */
causim_status causim_discover_variational(const causim_demos* demos,
                                          const causim_variational_options* opt,
                                          const char* ckpt_path, double* q, size_t q_len);

/* Interactive imitation baseline; writes the query/return curve as CSV and
 * reports the final iteration's mean return. */
causim_status causim_dagger_run(const causim_scenario* sc, int iterations, int rollouts_per_iter,
                                int initial_min_transitions, int eval_episodes,
                                const causim_train_options* opt, uint64_t seed,
                                const char* curve_csv_path, double* final_return);

/* Parses, validates and runs an experiment config file. Validation problems
 * come back as CAUSIM_CONFIG_ERROR with every offending field in the error
 * message. */
causim_status causim_run_experiment(const char* config_path);

/* Merged summary plus acceptance checklist over result directories.
 * out_path NULL writes to stdout. Zero directories is a valid no-op. */
causim_status causim_report(const char* const* bundle_dirs, size_t count, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
