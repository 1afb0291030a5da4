/* C interface to the sharpcs library. All handles are opaque; every call that
 * can fail returns a sharpcs_status and leaves a message for
 * sharpcs_last_error() on the calling thread. */
#ifndef SHARPCS_SHARPCS_H
#define SHARPCS_SHARPCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(SHARPCS_BUILDING_LIBRARY)
#define SHARPCS_API __attribute__((visibility("default")))
#else
#define SHARPCS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sharpcs_status {
  SHARPCS_OK = 0,
  SHARPCS_INVALID_ARGUMENT = 1,
  SHARPCS_RANK_DEFICIENT = 2,
  SHARPCS_INFEASIBLE = 3,
  SHARPCS_NO_NSP = 4,
  SHARPCS_NO_GUARANTEE = 5,
  SHARPCS_CONVERGENCE = 6,
  SHARPCS_NOT_CERTIFIABLE = 7,
  SHARPCS_UNSUPPORTED = 8,
  SHARPCS_PARSE = 9,
  SHARPCS_IO = 10,
  SHARPCS_SCHEMA = 11,
  SHARPCS_INTERNAL = 12
} sharpcs_status;

typedef struct sharpcs_matrix sharpcs_matrix;
typedef struct sharpcs_instance sharpcs_instance;
typedef struct sharpcs_solution sharpcs_solution;
typedef struct sharpcs_config sharpcs_config;

SHARPCS_API const char* sharpcs_version(void);
SHARPCS_API const char* sharpcs_status_string(sharpcs_status status);
/* Message of the last failed call on this thread ("" if none). */
SHARPCS_API const char* sharpcs_last_error(void);
/* Frees strings and double buffers returned by the library. */
SHARPCS_API void sharpcs_string_free(char* text);
SHARPCS_API void sharpcs_buffer_free(double* values);

/* ---- dense matrices (row-major) ---- */
SHARPCS_API sharpcs_status sharpcs_matrix_create(size_t rows, size_t cols, const double* values,
                                                 sharpcs_matrix** out);
SHARPCS_API sharpcs_status sharpcs_matrix_load(const char* path, sharpcs_matrix** out);
SHARPCS_API sharpcs_status sharpcs_matrix_save(const sharpcs_matrix* m, const char* path);
SHARPCS_API size_t sharpcs_matrix_rows(const sharpcs_matrix* m);
SHARPCS_API size_t sharpcs_matrix_cols(const sharpcs_matrix* m);
SHARPCS_API const double* sharpcs_matrix_data(const sharpcs_matrix* m);
SHARPCS_API void sharpcs_matrix_free(sharpcs_matrix* m);

SHARPCS_API sharpcs_status sharpcs_gaussian_matrix(uint64_t seed, size_t rows, size_t cols,
                                                   sharpcs_matrix** out);
SHARPCS_API sharpcs_status sharpcs_row_orthonormalize(const sharpcs_matrix* a, sharpcs_matrix** q,
                                                      sharpcs_matrix** transform);
SHARPCS_API sharpcs_status sharpcs_spectral_norm(const sharpcs_matrix* a, double* out);
SHARPCS_API sharpcs_status sharpcs_condition_number(const sharpcs_matrix* a, double* out);

/* Vectors in the matrix text format (n x 1 or 1 x n). The buffer returned by
 * sharpcs_vector_load is released with sharpcs_buffer_free. */
SHARPCS_API sharpcs_status sharpcs_vector_load(const char* path, double** values, size_t* length);
SHARPCS_API sharpcs_status sharpcs_vector_save(const char* path, const double* values, size_t length);

/* ---- random instances ---- */
SHARPCS_API sharpcs_status sharpcs_instance_generate(size_t p, size_t n, size_t k, double delta,
                                                     uint64_t seed, sharpcs_instance** out);
/* Borrowed views, valid until the instance is freed. */
SHARPCS_API const sharpcs_matrix* sharpcs_instance_matrix(const sharpcs_instance* inst);
SHARPCS_API const double* sharpcs_instance_signal(const sharpcs_instance* inst, size_t* length);
SHARPCS_API const double* sharpcs_instance_observations(const sharpcs_instance* inst, size_t* length);
/* Writes A.txt (orthonormalized), A_raw.txt, x0.txt, b.txt and b_clean.txt into dir. */
SHARPCS_API sharpcs_status sharpcs_instance_save(const sharpcs_instance* inst, const char* dir);
SHARPCS_API void sharpcs_instance_free(sharpcs_instance* inst);

/* ---- solving ---- */
typedef enum sharpcs_mode { SHARPCS_MODE_EQUALITY = 0, SHARPCS_MODE_BALL = 1 } sharpcs_mode;

typedef struct sharpcs_solve_options {
  sharpcs_mode mode;
  double delta;            /* ball radius is delta * ||A||_2 after orthonormalization */
  const char* restart;     /* "fixed:t=100,tau=10" or "grid:t0=50,tau=20" */
  int geometric_schedule;  /* halve the smoothing at every restart (default 1) */
  double mu0;              /* 0 selects the default initial smoothing */
  double stall_tolerance;  /* relative l1 change across a restart counted as converged */
  int monotone;
} sharpcs_solve_options;

SHARPCS_API void sharpcs_solve_options_default(sharpcs_solve_options* options);
/* Rows of A are orthonormalized (and b transformed) when A A^T != I. */
SHARPCS_API sharpcs_status sharpcs_solve(const sharpcs_matrix* a, const double* b, size_t b_length,
                                         const sharpcs_solve_options* options, sharpcs_solution** out);
SHARPCS_API const double* sharpcs_solution_x(const sharpcs_solution* sol, size_t* length);
/* 1 if the run stalled before the budget was spent. */
SHARPCS_API int sharpcs_solution_converged(const sharpcs_solution* sol);
SHARPCS_API double sharpcs_solution_residual(const sharpcs_solution* sol);
SHARPCS_API double sharpcs_solution_l1(const sharpcs_solution* sol);
SHARPCS_API size_t sharpcs_solution_iterations(const sharpcs_solution* sol);
SHARPCS_API size_t sharpcs_solution_restarts(const sharpcs_solution* sol);
SHARPCS_API sharpcs_status sharpcs_solution_write_trace_csv(const sharpcs_solution* sol, const char* path);
SHARPCS_API void sharpcs_solution_free(sharpcs_solution* sol);

/* ---- condition estimation ---- */
typedef struct sharpcs_power_params {
  double eps1;
  double eps2;
  double gamma;
  size_t max_iters;
  double tol;
  size_t restarts;
  size_t power_iters;
} sharpcs_power_params;

typedef struct sharpcs_condition_result {
  double mu_hat;
  double c_lower; /* +inf when infeasible */
  double spectral_norm;
  size_t power_iters;
  size_t init_runs;
  int converged;
  int infeasible;
} sharpcs_condition_result;

SHARPCS_API void sharpcs_power_params_default(sharpcs_power_params* params);
SHARPCS_API sharpcs_status sharpcs_condition_estimate(const sharpcs_matrix* a, const double* x0, size_t length,
                                                      const sharpcs_power_params* params, uint64_t seed,
                                                      sharpcs_condition_result* out);
/* JSON object with the estimate, kappa(A), per-run values and the parameters. */
SHARPCS_API sharpcs_status sharpcs_condition_report_json(const sharpcs_matrix* a, const double* x0,
                                                         size_t length, const sharpcs_power_params* params,
                                                         uint64_t seed, char** json);
SHARPCS_API sharpcs_status sharpcs_dual_certificate(const sharpcs_matrix* a, const double* x0, size_t length,
                                                    int* certified, double* slack);

/* ---- experiment configuration and runs ---- */
SHARPCS_API sharpcs_status sharpcs_config_default(sharpcs_config** out);
SHARPCS_API sharpcs_status sharpcs_config_parse(const char* json, sharpcs_config** out);
SHARPCS_API sharpcs_status sharpcs_config_load(const char* path, sharpcs_config** out);
SHARPCS_API sharpcs_status sharpcs_config_to_json(const sharpcs_config* cfg, char** json);
SHARPCS_API sharpcs_status sharpcs_config_set_seed(sharpcs_config* cfg, uint64_t seed);
SHARPCS_API sharpcs_status sharpcs_config_set_threads(sharpcs_config* cfg, size_t threads);
SHARPCS_API sharpcs_status sharpcs_config_set_out_dir(sharpcs_config* cfg, const char* dir);
SHARPCS_API sharpcs_status sharpcs_config_set_delta(sharpcs_config* cfg, double delta);
SHARPCS_API sharpcs_status sharpcs_config_set_restart(sharpcs_config* cfg, const char* spec);
SHARPCS_API sharpcs_status sharpcs_config_validate(const sharpcs_config* cfg);
SHARPCS_API void sharpcs_config_free(sharpcs_config* cfg);

/* Runs the configured experiment and writes its CSV files into the output
 * directory. */
SHARPCS_API sharpcs_status sharpcs_run_experiment(const sharpcs_config* cfg);

enum {
  SHARPCS_LOG_ERROR = 1,
  SHARPCS_LOG_PROBABILITY = 2,
  SHARPCS_LOG_ITERATIONS = 4,
  SHARPCS_LOG_CONDITION = 8,
  SHARPCS_LOG_DEFAULT = SHARPCS_LOG_ERROR | SHARPCS_LOG_ITERATIONS | SHARPCS_LOG_CONDITION
};

/* Renders error.svg, probability.svg, iterations.svg and condition.svg from a
 * trials CSV; set bits in log_mask select a logarithmic y-axis per plot. */
SHARPCS_API sharpcs_status sharpcs_render_report(const char* trials_csv, const char* out_dir,
                                                 unsigned log_mask);

#ifdef __cplusplus
}
#endif

#endif /* SHARPCS_SHARPCS_H */
