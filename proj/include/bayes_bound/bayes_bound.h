/*
 * Copyright 2026 The bayes_bound Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libbayes_bound.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a bb_status; on
 * failure a description is available from bb_last_error() on the same
 * thread until the next failing call.
 */
#ifndef BAYES_BOUND_H
#define BAYES_BOUND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BAYES_BOUND_BUILDING_LIBRARY)
#    define BB_API __declspec(dllexport)
#  else
#    define BB_API __declspec(dllimport)
#  endif
#else
#  define BB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bb_status {
  BB_OK = 0,
  BB_ERR_INVALID_ARGUMENT = 1,
  BB_ERR_IO = 2,
  BB_ERR_FORMAT = 3,
  BB_ERR_NUMERICAL = 4,
  BB_ERR_OUT_OF_RANGE = 5,
  BB_ERR_INTERNAL = 6
} bb_status;

typedef struct bb_model bb_model;
typedef struct bb_flow bb_flow;
typedef struct bb_curve bb_curve;
typedef struct bb_check bb_check;

enum { BB_COV_FULL = 0, BB_COV_DIAGONAL = 1, BB_COV_SCALAR = 2 };
enum { BB_FORMAT_BINARY = 0, BB_FORMAT_JSON = 1 };
enum { BB_MEANS_UNIT_SPHERE = 0, BB_MEANS_SIMPLEX = 1 };
enum { BB_WEIGHTS_BALANCED = 0, BB_WEIGHTS_NATURAL = 1 };
enum { BB_METHOD_CLOSED_FORM = 0, BB_METHOD_HDR = 1, BB_METHOD_MONTE_CARLO = 2 };

BB_API const char* bb_version(void);
BB_API const char* bb_last_error(void);
BB_API const char* bb_status_string(bb_status status);

/* ---- HDR configuration ------------------------------------------------ */

typedef struct bb_hdr_config {
  uint32_t n_per_level; /* samples per nesting level (default 512) */
  double rho;           /* conditional probability per level (default 0.5) */
  uint32_t repeats;     /* independent runs (default 8) */
  uint32_t max_levels;  /* nesting cap (default 200) */
  uint64_t seed;
  uint32_t thin;    /* 0 = reduced dimension */
  uint32_t burn_in; /* 0 = 4 x reduced dimension */
  uint32_t threads; /* 0 = all hardware threads */
} bb_hdr_config;

BB_API void bb_hdr_config_default(bb_hdr_config* config);

/* ---- models ------------------------------------------------------------ */

/* means: k*d row-major; cov: d*d, d or 1 values per cov_kind. */
BB_API bb_status bb_model_create(uint32_t k, uint32_t d, const double* priors, const double* means, int cov_kind,
                                 const double* cov, bb_model** out);
BB_API bb_status bb_model_load(const char* path, bb_model** out);
BB_API bb_status bb_model_save(const bb_model* model, const char* path, int format);
BB_API bb_status bb_model_generate(uint32_t k, uint32_t d, int mean_scheme, uint64_t seed, bb_model** out);
BB_API void bb_model_free(bb_model* model);

BB_API uint32_t bb_model_num_classes(const bb_model* model);
BB_API uint32_t bb_model_dim(const bb_model* model);
/* Copies K priors / K*d means (row-major) / d*d covariance (row-major). */
BB_API void bb_model_priors(const bb_model* model, double* out);
BB_API void bb_model_means(const bb_model* model, double* out);
BB_API void bb_model_covariance(const bb_model* model, double* out);

BB_API bb_status bb_log_density(const bb_model* model, uint32_t j, const double* x, double tau, double* out);
BB_API bb_status bb_classify(const bb_model* model, const double* x, double tau, uint32_t* out);
/* Two equal-prior classes only. log_error may be NULL. */
BB_API bb_status bb_binary_closed_form(const bb_model* model, double tau, double* error, double* log_error);

/* ---- Bayes error ------------------------------------------------------- */

typedef struct bb_class_term {
  double p;        /* probability of a correct decision for this class */
  double log_miss; /* log(1 - p) */
  double std_error;
  uint32_t levels;
  uint64_t degenerate_steps;
  int via_complement;
  int reduced_dim;
  uint32_t num_constraints;
} bb_class_term;

typedef struct bb_bayes_result {
  double error;
  double log_error;
  double std_error;
  double tau;
  int method;         /* BB_METHOD_* */
  uint32_t levels_total;
  int has_closed_form;
  double closed_form;
} bb_bayes_result;

/* per_class may be NULL; otherwise it must hold K entries. */
BB_API bb_status bb_compute_bayes_error(const bb_model* model, double tau, const bb_hdr_config* config,
                                        bb_bayes_result* out, bb_class_term* per_class);
BB_API bb_status bb_monte_carlo_bayes_error(const bb_model* model, double tau, uint64_t n, uint64_t seed,
                                            uint32_t threads, bb_bayes_result* out);
BB_API bb_status bb_one_vs_all_error(const bb_model* model, uint32_t j, double tau, uint64_t n, uint64_t seed,
                                     int weights, uint32_t threads, double* error, double* std_error);

/* Fills `out` (capacity `steps`) with a geometric (geometric != 0) or linear grid. */
BB_API bb_status bb_tau_grid(double lo, double hi, uint32_t steps, int geometric, double* out);

BB_API bb_status bb_temperature_sweep(const bb_model* model, const double* taus, size_t n_taus,
                                      const bb_hdr_config* config, bb_curve** out);
BB_API size_t bb_curve_size(const bb_curve* curve);
BB_API bb_status bb_curve_point(const bb_curve* curve, size_t i, bb_bayes_result* out);
BB_API size_t bb_curve_num_warnings(const bb_curve* curve);
BB_API const char* bb_curve_warning(const bb_curve* curve, size_t i);
/* Writes `tau,bayes_error,stderr,method,levels_total`; path "-" = stdout. */
BB_API bb_status bb_curve_write_csv(const bb_curve* curve, const char* path);
BB_API void bb_curve_free(bb_curve* curve);

typedef struct bb_inversion {
  double tau;
  bb_bayes_result estimate;
  uint32_t evaluations;
  uint32_t repeats_used;
  int warned_floor; /* target fell below the stderr floor even after escalation */
} bb_inversion;

BB_API bb_status bb_invert_temperature(const bb_model* model, double target, double tau_lo, double tau_hi,
                                       double tol, double tol_error, const bb_hdr_config* config,
                                       bb_inversion* out);

/* ---- closed-form accuracy check ---------------------------------------- */

typedef struct bb_check_row {
  double tau;
  double exact;
  double hdr;
  double std_error;
  double rel_err;
  int log_space;
} bb_check_row;

BB_API bb_status bb_validate_binary_closed_form(uint32_t dim, const double* taus, size_t n_taus,
                                                const bb_hdr_config* config, uint64_t model_seed,
                                                bb_check** out);
BB_API size_t bb_check_size(const bb_check* check);
BB_API bb_status bb_check_row_at(const bb_check* check, size_t i, bb_check_row* out);
BB_API int bb_check_passed(const bb_check* check);
/* Writes `tau,exact,hdr,stderr,rel_err`; path "-" = stdout. */
BB_API bb_status bb_check_write_csv(const bb_check* check, const char* path);
BB_API void bb_check_free(bb_check* check);

/* ---- coupling flows ---------------------------------------------------- */

BB_API bb_status bb_flow_load(const char* path, bb_flow** out);
BB_API bb_status bb_flow_save(const bb_flow* flow, const char* path);
BB_API bb_status bb_flow_random(uint32_t d, uint32_t num_layers, uint64_t seed, int affine, bb_flow** out);
BB_API void bb_flow_free(bb_flow* flow);
BB_API uint32_t bb_flow_dim(const bb_flow* flow);
BB_API uint32_t bb_flow_num_layers(const bb_flow* flow);
BB_API bb_status bb_flow_forward(const bb_flow* flow, const double* z, double* x);
BB_API bb_status bb_flow_inverse(const bb_flow* flow, const double* x, double* z);
BB_API bb_status bb_flow_log_det(const bb_flow* flow, const double* z, double* out);
BB_API bb_status bb_pushforward_log_density(const bb_flow* flow, const bb_model* model, uint32_t j, const double* x,
                                            double tau, double* out);

typedef struct bb_invariance_report {
  double x_space_mc;
  double x_space_std_error;
  double base_hdr;
  double base_std_error;
  double combined_std_error;
  int pass;
} bb_invariance_report;

BB_API bb_status bb_invariance_harness(const bb_flow* flow, const bb_model* model, double tau, uint64_t n,
                                       const bb_hdr_config* config, bb_invariance_report* out);
BB_API bb_status bb_classifier_mismatches(const bb_flow* flow, const bb_model* model, double tau,
                                          uint64_t n_points, uint64_t seed, uint64_t* out);

#ifdef __cplusplus
}
#endif

#endif
