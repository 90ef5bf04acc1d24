/* C interface to the gapsafe library.
 *
 * Every function returning int reports a gs_status; on failure a message is
 * available from gs_last_error() on the calling thread. Handles are opaque
 * and owned by the caller, who releases them with the matching _free call.
 */
#ifndef GAPSAFE_H
#define GAPSAFE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GS_API __declspec(dllexport)
#else
#define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_INVALID_ARGUMENT = -1,
  GS_ERR_INDEX = -2,
  GS_ERR_PARSE = -3,
  GS_ERR_IO = -4,
  GS_ERR_NUMERICAL = -5,
  GS_ERR_CONTRACT = -6,
  GS_ERR_NULL_POINTER = -7,
  GS_ERR_BUFFER_TOO_SMALL = -8,
  GS_ERR_INTERNAL = -99
} gs_status;

typedef enum gs_rule {
  GS_RULE_NONE = 0,
  GS_RULE_STATIC = 1,
  GS_RULE_DYNAMIC = 2,
  GS_RULE_ST3 = 3,
  GS_RULE_GAP_SPHERE = 4,
  GS_RULE_GAP_DOME = 5
} gs_rule;

typedef enum gs_format { GS_FORMAT_DENSE_CSV = 0, GS_FORMAT_SVMLIGHT = 1 } gs_format;

typedef struct gs_dataset gs_dataset;
typedef struct gs_path gs_path;

GS_API const char* gs_version(void);
GS_API const char* gs_last_error(void);
GS_API const char* gs_status_string(int status);

GS_API int gs_rule_from_name(const char* name, gs_rule* out);
GS_API const char* gs_rule_name(gs_rule rule);
GS_API int gs_format_from_name(const char* name, gs_format* out);

/* datasets */
GS_API int gs_dataset_load(const char* path, gs_format format, gs_dataset** out);
GS_API int gs_dataset_synth(size_t n, size_t p, double density, double snr, uint64_t seed,
                            gs_dataset** out);
GS_API int gs_dataset_from_dense(size_t n, size_t p, const double* col_major, const double* y,
                                 gs_dataset** out);
GS_API int gs_dataset_save(const gs_dataset* data, const char* path, gs_format format);
GS_API int gs_dataset_normalize(gs_dataset* data);
GS_API int gs_dataset_shape(const gs_dataset* data, size_t* n, size_t* p);
GS_API int gs_dataset_lambda_max(const gs_dataset* data, double* out);
GS_API void gs_dataset_free(gs_dataset* data);

/* single solve and regularization path */
typedef struct gs_solver_options {
  double epsilon;      /* target duality gap */
  size_t max_passes;
  size_t screen_every;
  gs_rule rule;
  double l1_ratio;     /* 1 for the Lasso, (0, 1) for the Elastic Net */
} gs_solver_options;

typedef struct gs_solve_info {
  double primal;
  double dual;
  double gap;
  size_t passes;
  size_t n_active;
  int converged;
  double elapsed_ms;
} gs_solve_info;

GS_API void gs_solver_options_init(gs_solver_options* opts);

/* beta_out must hold p values. */
GS_API int gs_solve(const gs_dataset* data, double lambda, const gs_solver_options* opts,
                    double* beta_out, gs_solve_info* info);

GS_API int gs_path_run(const gs_dataset* data, size_t grid_T, double grid_delta,
                       const gs_solver_options* opts, gs_path** out);
GS_API size_t gs_path_length(const gs_path* path);
GS_API int gs_path_lambda(const gs_path* path, size_t t, double* out);
GS_API int gs_path_beta(const gs_path* path, size_t t, double* beta_out, size_t len);
GS_API int gs_path_info(const gs_path* path, size_t t, gs_solve_info* info);
GS_API void gs_path_free(gs_path* path);

/* benchmark harness */
typedef struct gs_bench_options {
  const char* data_path; /* NULL or "" selects synthetic data */
  gs_format format;
  size_t synth_n;
  size_t synth_p;
  double synth_density;
  double synth_snr;
  const gs_rule* rules;
  size_t n_rules;
  size_t grid_T;
  double grid_delta;
  const double* epsilons;
  size_t n_epsilons;
  size_t screen_every;
  size_t max_passes;
  double l1_ratio;
  int normalize;
  const char* out_dir;
  uint64_t seed;
  int parallel_rules;
} gs_bench_options;

typedef struct gs_bench_run {
  gs_rule rule;
  double epsilon;
  double total_ms;
  size_t n_lambdas;
  size_t converged;
  size_t passes;
} gs_bench_run;

GS_API void gs_bench_options_init(gs_bench_options* opts);

/* Writes trace.csv, summary.json and metadata.json into opts->out_dir.
 * Fills up to `capacity` entries of runs_out and sets *n_runs to the total. */
GS_API int gs_benchmark_run(const gs_bench_options* opts, gs_bench_run* runs_out,
                            size_t capacity, size_t* n_runs);

#ifdef __cplusplus
}
#endif

#endif /* GAPSAFE_H */
