#ifndef SPINE_SPINE_H
#define SPINE_SPINE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SPINE_API __declspec(dllexport)
#else
#define SPINE_API __attribute__((visibility("default")))
#endif

typedef enum spine_status {
  SPINE_OK = 0,
  SPINE_ERR_DOMAIN,
  SPINE_ERR_EMPTY_POPULATION,
  SPINE_ERR_UNKNOWN_LABEL,
  SPINE_ERR_MODEL_SHAPE,
  SPINE_ERR_CAPACITY,
  SPINE_ERR_NOT_IRREDUCIBLE,
  SPINE_ERR_NO_CONVERGENCE,
  SPINE_ERR_NO_NULL_VECTOR,
  SPINE_ERR_POSITIVITY_LOSS,
  SPINE_ERR_MAJORANT_EXCEEDED,
  SPINE_ERR_ASSUMPTION_VIOLATED,
  SPINE_ERR_DEGENERATE_SAMPLE,
  SPINE_ERR_CONFIG,
  SPINE_ERR_IO,
  SPINE_ERR_INVALID_ARGUMENT,
  SPINE_ERR_INTERNAL
} spine_status;

typedef enum spine_sim_status {
  SPINE_SIM_COMPLETED = 0,
  SPINE_SIM_EXTINCT = 1,
  SPINE_SIM_CENSORED = 2
} spine_sim_status;

typedef enum spine_fraction_law {
  SPINE_FRACTION_POINT = 0,
  SPINE_FRACTION_BETA = 1,
  SPINE_FRACTION_UNIFORM = 2
} spine_fraction_law;

typedef struct spine_config spine_config;
typedef struct spine_model spine_model;
typedef struct spine_eigen spine_eigen;

/* Message of the last failed call on this thread; never NULL. */
SPINE_API const char* spine_last_error(void);
SPINE_API const char* spine_status_name(spine_status s);
SPINE_API const char* spine_version(void);

/* Experiment configuration (JSON text). Overrides apply on the next run. */
SPINE_API spine_status spine_config_load(const char* path, spine_config** out);
SPINE_API spine_status spine_config_parse(const char* text, spine_config** out);
SPINE_API void spine_config_free(spine_config* cfg);
SPINE_API spine_status spine_config_set_seed(spine_config* cfg, uint64_t seed);
SPINE_API spine_status spine_config_set_replicas(spine_config* cfg, uint64_t n);
SPINE_API spine_status spine_config_set_horizon(spine_config* cfg, double t);
SPINE_API spine_status spine_config_set_max_events(spine_config* cfg, uint64_t m);
SPINE_API spine_status spine_config_set_threads(spine_config* cfg, uint64_t k);
SPINE_API spine_status spine_config_set_out_dir(spine_config* cfg, const char* dir);

/* Runs simulate | compare | eigen | phase | odelimit. *exit_code is 0 when
   every check passes, 1 on a statistical failure, 2 on a configuration or
   model error (message in spine_last_error). */
SPINE_API spine_status spine_run(spine_config* cfg, const char* command,
                                 int* exit_code);
/* Progress and diagnostic text of the last spine_run on this thread. */
SPINE_API const char* spine_last_log(void);

/* Models. */
SPINE_API spine_status spine_model_logistic(double b, double c, int64_t initial,
                                            spine_model** out);
SPINE_API spine_status spine_model_sir(double beta, double gamma, int64_t n,
                                       spine_model** out);
SPINE_API spine_status spine_model_from_config(const spine_config* cfg,
                                               spine_model** out);
SPINE_API void spine_model_free(spine_model* m);
SPINE_API spine_status spine_model_num_types(const spine_model* m, size_t* out);

/* psi names: "inverse-size", "constant-one", "eigen-h". */
SPINE_API spine_status spine_lambda(const spine_model* m, const char* psi,
                                    uint32_t type, const int64_t* counts,
                                    double* out);

/* One replica of the original process; final_counts has num_types entries. */
SPINE_API spine_status spine_simulate(const spine_model* m, double horizon,
                                      uint64_t seed, uint64_t replica,
                                      uint64_t max_events, int64_t* final_counts,
                                      spine_sim_status* status, double* end_time);

/* One replica of the psi-spine process and its weight exp(int lambda)/(psi Z)
   under uniform sampling. */
SPINE_API spine_status spine_simulate_spine(const spine_model* m, const char* psi,
                                            double horizon, uint64_t seed,
                                            uint64_t replica, uint64_t max_events,
                                            int64_t* final_counts, double* weight);

/* Finite state-space spectral data of a capacity-bounded model. */
SPINE_API spine_status spine_eigen_solve(const spine_model* m, double tol,
                                         spine_eigen** out);
SPINE_API void spine_eigen_free(spine_eigen* e);
SPINE_API spine_status spine_eigen_size(const spine_eigen* e, size_t* out);
SPINE_API spine_status spine_eigen_lambda(const spine_eigen* e, double* out);
SPINE_API spine_status spine_eigen_state(const spine_eigen* e, size_t index,
                                         double* h, double* gamma, double* pi);

SPINE_API spine_status spine_gf_threshold(double b, double c,
                                          spine_fraction_law law, double param,
                                          double* out);

#ifdef __cplusplus
}
#endif

#endif
