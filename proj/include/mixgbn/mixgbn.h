/* C interface to the mixgbn engine: Gaussian Bayesian network mixtures with
 * structure MCMC and collapsed Gibbs allocation.
 *
 * Every function returns a mixgbn_status. On failure mixgbn_last_error()
 * describes the problem (per thread). Objects are opaque and owned by the
 * caller, who releases them with the matching *_free function. Node and
 * component numbers in files are 1-based. Matrices are row-major.
 */
#ifndef MIXGBN_MIXGBN_H
#define MIXGBN_MIXGBN_H

#include <stddef.h>
#include <stdint.h>

#if defined(MIXGBN_BUILDING_LIBRARY)
#define MIXGBN_API __attribute__((visibility("default")))
#else
#define MIXGBN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mixgbn_status {
  MIXGBN_OK = 0,
  MIXGBN_INVALID_ARGUMENT = 1, /* bad input, flag or file content */
  MIXGBN_NUMERICAL = 2,        /* non-SPD matrix and similar failures */
  MIXGBN_IO = 3,               /* unreadable or unwritable path */
  MIXGBN_INTERNAL = 4
} mixgbn_status;

typedef enum mixgbn_model { MIXGBN_MODEL_H = 0, MIXGBN_MODEL_M1 = 1, MIXGBN_MODEL_M2 = 2 } mixgbn_model;

typedef struct mixgbn_dataset mixgbn_dataset;
typedef struct mixgbn_truth mixgbn_truth;
typedef struct mixgbn_sample mixgbn_sample;

MIXGBN_API const char* mixgbn_version(void);
MIXGBN_API const char* mixgbn_last_error(void);
/* Frees strings returned through char** out-parameters. */
MIXGBN_API void mixgbn_string_free(char* s);

MIXGBN_API mixgbn_status mixgbn_model_parse(const char* name, mixgbn_model* out);

/* ---- datasets ---- */

/* label_column may be NULL. With standardize != 0 every column is scaled to
 * mean 0 and unit sample variance. */
MIXGBN_API mixgbn_status mixgbn_dataset_load_csv(const char* path, int standardize,
                                                 const char* label_column, mixgbn_dataset** out);
MIXGBN_API mixgbn_status mixgbn_dataset_from_matrix(const double* values, int rows, int cols,
                                                    mixgbn_dataset** out);
MIXGBN_API void mixgbn_dataset_free(mixgbn_dataset* d);
MIXGBN_API int mixgbn_dataset_rows(const mixgbn_dataset* d);
MIXGBN_API int mixgbn_dataset_cols(const mixgbn_dataset* d);
MIXGBN_API mixgbn_status mixgbn_dataset_values(const mixgbn_dataset* d, double* out);
/* Shifts and scales every column to mean 0 and unit sample variance. With a
 * reference dataset its column means and deviations are used instead. */
MIXGBN_API mixgbn_status mixgbn_dataset_standardize(mixgbn_dataset* d, const mixgbn_dataset* reference);
MIXGBN_API mixgbn_status mixgbn_dataset_write_csv(const mixgbn_dataset* d, const char* path);
/* Class labels read with the dataset as 1..K in order of first appearance.
 * out holds rows() ints. */
MIXGBN_API mixgbn_status mixgbn_dataset_label_ids(const mixgbn_dataset* d, int* out);

/* One label per line (blank lines skipped, optional header "z"); labels are
 * mapped to 1..K by first appearance. out holds `expected` ints. */
MIXGBN_API mixgbn_status mixgbn_read_labels(const char* path, int expected, int* out);

/* ---- simulation ---- */

typedef struct mixgbn_sim_config {
  int n;
  int m;
  int k;
  double expected_edges;
  uint64_t seed;
  uint64_t replicate;
} mixgbn_sim_config;

MIXGBN_API void mixgbn_sim_config_default(mixgbn_sim_config* cfg);
MIXGBN_API mixgbn_status mixgbn_simulate(const mixgbn_sim_config* cfg, mixgbn_dataset** data,
                                         mixgbn_truth** truth);

MIXGBN_API mixgbn_status mixgbn_truth_read_json(const char* path, mixgbn_truth** out);
MIXGBN_API mixgbn_status mixgbn_truth_write_json(const mixgbn_truth* t, const char* path);
MIXGBN_API void mixgbn_truth_free(mixgbn_truth* t);
MIXGBN_API int mixgbn_truth_nodes(const mixgbn_truth* t);
/* Labels 1..K, out holds m ints. */
MIXGBN_API mixgbn_status mixgbn_truth_labels(const mixgbn_truth* t, int* out, int m);

/* ---- sampling ---- */

typedef struct mixgbn_chain_config {
  mixgbn_model model;
  long iters;
  long thin; /* 0: chosen so that iters / (2 thin) = 500 where possible */
  uint64_t seed;
  int max_fanin; /* 0: unbounded */
  int gibbs_moves_per_iter;
  /* Latent allocation starts uniformly at random over this many components
   * (1: all rows together). */
  int init_components;
  double edge_penalty;
  /* Hyperparameters. NaN entries take the defaults alpha_w = n + 1,
   * alpha_mu = 1, lambda = 1. t_dagger (n*n) and nu (n) may be NULL, which
   * gives t_scale * I (t_scale NaN: 1) and nu_value * 1 (nu_value NaN: 0). */
  double alpha_w;
  double alpha_mu;
  double lambda;
  double t_scale;
  double nu_value;
  const double* t_dagger;
  const double* nu;
  /* Optional JSON object with any of t_dagger, nu, alpha_w, alpha_mu, lambda
   * and per_component; applied before the fields above. */
  const char* hyperparameters_json;
  /* Known allocation (m labels, 1-based). NULL: latent. */
  const int* labels;
} mixgbn_chain_config;

MIXGBN_API void mixgbn_chain_config_default(mixgbn_chain_config* cfg);
MIXGBN_API long mixgbn_auto_thin(long iters);

/* Runs `chains` independent chains. out_chains (may be NULL) receives one
 * sample per chain, out_pooled (may be NULL) their concatenation. */
MIXGBN_API mixgbn_status mixgbn_sample_run(const mixgbn_dataset* data, const mixgbn_chain_config* cfg,
                                           int chains, mixgbn_sample** out_chains,
                                           mixgbn_sample** out_pooled);
/* Writes <stem>.jsonl with <stem>.summary.json and <stem>.trace.csv. */
MIXGBN_API mixgbn_status mixgbn_sample_write(const mixgbn_sample* s, const char* jsonl_path);
MIXGBN_API mixgbn_status mixgbn_sample_read(const char* jsonl_path, mixgbn_sample** out);
MIXGBN_API void mixgbn_sample_free(mixgbn_sample* s);
MIXGBN_API int mixgbn_sample_draws(const mixgbn_sample* s);
MIXGBN_API int mixgbn_sample_nodes(const mixgbn_sample* s);
MIXGBN_API int mixgbn_sample_observations(const mixgbn_sample* s);
MIXGBN_API double mixgbn_sample_acceptance(const mixgbn_sample* s);
/* Resolved chain settings and hyperparameters as JSON. */
MIXGBN_API mixgbn_status mixgbn_sample_config_json(const mixgbn_sample* s, char** out);

/* ---- evaluation ---- */

/* out: n*n edge posteriors (CPDAG based; undirected edges count both ways). */
MIXGBN_API mixgbn_status mixgbn_edge_scores(const mixgbn_sample* s, double* out);
/* out: m*m co-allocation probabilities. */
MIXGBN_API mixgbn_status mixgbn_coallocation(const mixgbn_sample* s, double* out);
/* Edge list ("j -> i" / "j -- i") of the thresholded prediction. */
MIXGBN_API mixgbn_status mixgbn_predict_network(const double* scores, int n, double psi, char** out);
MIXGBN_API mixgbn_status mixgbn_auc_pr(const double* scores, int n, const mixgbn_truth* truth,
                                       double* out);
/* rSHD of the prediction at threshold psi against the true CPDAG. */
MIXGBN_API mixgbn_status mixgbn_rshd(const double* scores, int n, double psi,
                                     const mixgbn_truth* truth, double* out);

/* Geometric mean predictive probability (log) of `holdout`, drawing
 * draws_per_state parameter sets per posterior state from `train`.
 * per_observation (may be NULL) receives holdout-rows log densities. */
MIXGBN_API mixgbn_status mixgbn_predictive_logprob(const mixgbn_sample* s, const mixgbn_dataset* train,
                                                   const mixgbn_dataset* holdout, int draws_per_state,
                                                   uint64_t seed, double* out, double* per_observation);

#ifdef __cplusplus
}
#endif

#endif
