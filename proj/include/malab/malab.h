/* Copyright 2026 The malab Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the malab library. Every function returns a malab_status;
 * on failure malab_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller once returned.
 */
#ifndef MALAB_MALAB_H_
#define MALAB_MALAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MALAB_BUILDING_LIBRARY)
#define MALAB_API __attribute__((visibility("default")))
#else
#define MALAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum malab_status {
  MALAB_OK = 0,
  MALAB_ERR_DOMAIN = 1,
  MALAB_ERR_METRIC = 2,
  MALAB_ERR_INVERSION = 3,
  MALAB_ERR_DIMENSION = 4,
  MALAB_ERR_RESOLUTION = 5,
  MALAB_ERR_CONTRACT = 6,
  MALAB_ERR_CONVERGENCE = 7,
  MALAB_ERR_FIT = 8,
  MALAB_ERR_CONFIG = 9,
  MALAB_ERR_IO = 10,
  MALAB_ERR_INVALID_ARGUMENT = 11,
  MALAB_ERR_INTERNAL = 12
} malab_status;

typedef enum malab_kernel { MALAB_KERNEL_DEMAILLY = 0, MALAB_KERNEL_POLYNOMIAL = 1 } malab_kernel;

typedef enum malab_metric {
  MALAB_METRIC_FLAT = 0,
  MALAB_METRIC_FS_P1 = 1,
  MALAB_METRIC_FS_P2 = 2
} malab_metric;

typedef struct malab_grid malab_grid;
typedef struct malab_report malab_report;
typedef struct malab_verification malab_verification;

MALAB_API const char* malab_version(void);
MALAB_API const char* malab_last_error(void);
MALAB_API const char* malab_status_name(malab_status status);

/* Grid functions on the torus C^n / Z^{2n}. */
MALAB_API malab_status malab_grid_create(int n, int resolution, malab_grid** out);
MALAB_API void malab_grid_destroy(malab_grid* grid);
MALAB_API malab_status malab_grid_shape(const malab_grid* grid, int* n, int* resolution, size_t* size);
MALAB_API malab_status malab_grid_values(malab_grid* grid, double** values);
MALAB_API malab_status malab_grid_read(const char* path, malab_grid** out);
MALAB_API malab_status malab_grid_write(const malab_grid* grid, const char* path);

/* Operations. */
MALAB_API malab_status malab_smooth(const malab_grid* phi, malab_kernel kernel, double eps, malab_grid** out);
MALAB_API malab_status malab_psh_defect(const malab_grid* phi, double* out);
MALAB_API malab_status malab_ma_operator(const malab_grid* phi, malab_grid** out);
/* Solves det(I + H(phi)) = f with sup phi = 0. */
MALAB_API malab_status malab_solve(const malab_grid* density, double p, double residual_tolerance, malab_grid** phi,
                                   double* residual);
/* Writes the n^4 coefficients c_{jk̄lm̄} as interleaved (re, im) pairs in
 * (j, k, l, m) row-major order; z holds 2n reals. `n` is the dimension of
 * the flat metric and is ignored otherwise. `capacity` counts doubles. */
MALAB_API malab_status malab_chern_coefficients(malab_metric metric, int n, const double* z, double* out,
                                                size_t capacity, int* dim);

/* Experiment harness. out_dir may be NULL (then MALAB_OUT or "malab-out"). */
MALAB_API malab_status malab_run_config(const char* path, const char* out_dir, int override_seed, uint64_t seed,
                                        malab_report** out);
MALAB_API malab_status malab_run_config_text(const char* yaml, const char* out_dir, int override_seed,
                                             uint64_t seed, malab_report** out);
MALAB_API const char* malab_report_text(const malab_report* report);
MALAB_API const char* malab_report_path(const malab_report* report);
MALAB_API const char* malab_report_hash(const malab_report* report);
MALAB_API int malab_report_passed(const malab_report* report);
MALAB_API void malab_report_destroy(malab_report* report);

/* Preset catalog as text, returned in a report handle. */
MALAB_API malab_status malab_presets(malab_report** out);

/* Built-in acceptance suite. */
MALAB_API malab_status malab_verify(const char* out_dir, int workers, malab_verification** out);
MALAB_API int malab_verify_passed(const malab_verification* v);
MALAB_API const char* malab_verify_text(const malab_verification* v);
MALAB_API const char* malab_verify_path(const malab_verification* v);
MALAB_API size_t malab_verify_count(const malab_verification* v);
MALAB_API malab_status malab_verify_criterion(const malab_verification* v, size_t index, int* id, const char** title,
                                              int* passed, double* seconds, double* time_limit, const char** error);
MALAB_API void malab_verify_destroy(malab_verification* v);

#ifdef __cplusplus
}
#endif

#endif /* MALAB_MALAB_H_ */
