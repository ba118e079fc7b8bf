// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/malab.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "malab/acceptance.hpp"
#include "malab/config.hpp"
#include "malab/curvature.hpp"
#include "malab/error.hpp"
#include "malab/grid.hpp"
#include "malab/harness.hpp"
#include "malab/kernel.hpp"
#include "malab/ma_solver.hpp"
#include "malab/smoothing.hpp"

struct malab_grid {
  malab::GridFunction f;
};

struct malab_report {
  std::string text;
  std::string path;
  std::string hash;
  bool passed = false;
};

struct malab_verification {
  malab::VerifyOutcome outcome;
  std::string path;
};

namespace {

thread_local std::string g_last_error;

malab_status status_of(malab::ErrorKind kind) {
  switch (kind) {
    case malab::ErrorKind::Domain: return MALAB_ERR_DOMAIN;
    case malab::ErrorKind::Metric: return MALAB_ERR_METRIC;
    case malab::ErrorKind::Inversion: return MALAB_ERR_INVERSION;
    case malab::ErrorKind::Dimension: return MALAB_ERR_DIMENSION;
    case malab::ErrorKind::Resolution: return MALAB_ERR_RESOLUTION;
    case malab::ErrorKind::Contract: return MALAB_ERR_CONTRACT;
    case malab::ErrorKind::Convergence: return MALAB_ERR_CONVERGENCE;
    case malab::ErrorKind::Fit: return MALAB_ERR_FIT;
    case malab::ErrorKind::Config: return MALAB_ERR_CONFIG;
    case malab::ErrorKind::Io: return MALAB_ERR_IO;
  }
  return MALAB_ERR_INTERNAL;
}

template <typename Fn>
malab_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MALAB_OK;
  } catch (const malab::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MALAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MALAB_ERR_INTERNAL;
  }
}

malab_status invalid(const char* what) {
  g_last_error = what;
  return MALAB_ERR_INVALID_ARGUMENT;
}

malab::KernelKind kernel_of(malab_kernel k) {
  if (k == MALAB_KERNEL_DEMAILLY) return malab::KernelKind::Demailly;
  if (k == MALAB_KERNEL_POLYNOMIAL) return malab::KernelKind::Polynomial;
  malab::fail(malab::ErrorKind::Domain, "unknown kernel kind");
}

malab_status run(malab::ExperimentConfig cfg, const char* out_dir, int override_seed, uint64_t seed,
                 malab_report** out) {
  if (override_seed) cfg.seed = seed;
  const auto dir = malab::resolve_output_dir(out_dir ? std::optional<std::string>(out_dir) : std::nullopt, cfg.output_dir);
  const malab::RunOutcome r = malab::run_experiment(cfg, dir);
  *out = new malab_report{r.report_text, r.report_path.string(), r.hash, r.passed};
  return MALAB_OK;
}

}  // namespace

extern "C" {

const char* malab_version(void) {
  static const std::string v = malab::version_string();
  return v.c_str();
}

const char* malab_last_error(void) { return g_last_error.c_str(); }

const char* malab_status_name(malab_status status) {
  switch (status) {
    case MALAB_OK: return "ok";
    case MALAB_ERR_DOMAIN: return "domain error";
    case MALAB_ERR_METRIC: return "metric error";
    case MALAB_ERR_INVERSION: return "inversion error";
    case MALAB_ERR_DIMENSION: return "dimension error";
    case MALAB_ERR_RESOLUTION: return "resolution error";
    case MALAB_ERR_CONTRACT: return "contract error";
    case MALAB_ERR_CONVERGENCE: return "convergence error";
    case MALAB_ERR_FIT: return "fit error";
    case MALAB_ERR_CONFIG: return "config error";
    case MALAB_ERR_IO: return "io error";
    case MALAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MALAB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

malab_status malab_grid_create(int n, int resolution, malab_grid** out) {
  if (out == nullptr) return invalid("out is null");
  return guarded([&] { *out = new malab_grid{malab::GridFunction(malab::TorusGrid(n, resolution))}; });
}

void malab_grid_destroy(malab_grid* grid) { delete grid; }

malab_status malab_grid_shape(const malab_grid* grid, int* n, int* resolution, size_t* size) {
  if (grid == nullptr) return invalid("grid is null");
  if (n) *n = grid->f.grid().n();
  if (resolution) *resolution = grid->f.grid().resolution();
  if (size) *size = grid->f.size();
  return MALAB_OK;
}

malab_status malab_grid_values(malab_grid* grid, double** values) {
  if (grid == nullptr || values == nullptr) return invalid("null argument");
  *values = grid->f.values().data();
  return MALAB_OK;
}

malab_status malab_grid_read(const char* path, malab_grid** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new malab_grid{malab::read_grid(path)}; });
}

malab_status malab_grid_write(const malab_grid* grid, const char* path) {
  if (grid == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { malab::write_grid(grid->f, path); });
}

malab_status malab_smooth(const malab_grid* phi, malab_kernel kernel, double eps, malab_grid** out) {
  if (phi == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const auto k = malab::SmoothingKernel::make(kernel_of(kernel), phi->f.grid().n());
    *out = new malab_grid{malab::smooth(phi->f, k, eps)};
  });
}

malab_status malab_psh_defect(const malab_grid* phi, double* out) {
  if (phi == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = malab::quasi_psh_defect(phi->f); });
}

malab_status malab_ma_operator(const malab_grid* phi, malab_grid** out) {
  if (phi == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = new malab_grid{malab::ma_operator(phi->f)}; });
}

malab_status malab_solve(const malab_grid* density, double p, double residual_tolerance, malab_grid** phi,
                         double* residual) {
  if (density == nullptr || phi == nullptr) return invalid("null argument");
  return guarded([&] {
    malab::SolverOptions opts;
    opts.residual_tolerance = residual_tolerance;
    const malab::Density f = malab::validate_density(density->f, p);
    malab::SolveResult r = malab::solve_ma(f, opts);
    if (residual) *residual = r.residual;
    *phi = new malab_grid{std::move(r.phi)};
  });
}

malab_status malab_chern_coefficients(malab_metric metric, int n, const double* z, double* out, size_t capacity,
                                      int* dim) {
  if (z == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    malab::MetricSpec spec = metric == MALAB_METRIC_FLAT    ? malab::MetricSpec::flat(n)
                             : metric == MALAB_METRIC_FS_P1 ? malab::MetricSpec::fubini_study_p1()
                             : metric == MALAB_METRIC_FS_P2 ? malab::MetricSpec::fubini_study_p2()
                                                            : (malab::fail(malab::ErrorKind::Domain, "unknown metric"),
                                                               malab::MetricSpec::flat(1));
    const int d = spec.dim();
    const std::size_t needed = 2 * static_cast<std::size_t>(d) * d * d * d;
    if (capacity < needed) malab::fail(malab::ErrorKind::Dimension, "output buffer too small");
    malab::CVector pt(d);
    for (int j = 0; j < d; ++j) pt(j) = malab::cplx(z[2 * j], z[2 * j + 1]);
    const malab::CurvatureTensor t = malab::chern_coefficients(spec, pt);
    std::size_t i = 0;
    for (const malab::cplx c : t.coeffs()) {
      out[i++] = c.real();
      out[i++] = c.imag();
    }
    if (dim) *dim = d;
  });
}

malab_status malab_run_config(const char* path, const char* out_dir, int override_seed, uint64_t seed,
                              malab_report** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { run(malab::load_config(path), out_dir, override_seed, seed, out); });
}

malab_status malab_run_config_text(const char* yaml, const char* out_dir, int override_seed, uint64_t seed,
                                   malab_report** out) {
  if (yaml == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { run(malab::parse_config(yaml, "<text>"), out_dir, override_seed, seed, out); });
}

const char* malab_report_text(const malab_report* report) { return report ? report->text.c_str() : ""; }
const char* malab_report_path(const malab_report* report) { return report ? report->path.c_str() : ""; }
const char* malab_report_hash(const malab_report* report) { return report ? report->hash.c_str() : ""; }
int malab_report_passed(const malab_report* report) { return report && report->passed ? 1 : 0; }
void malab_report_destroy(malab_report* report) { delete report; }

malab_status malab_presets(malab_report** out) {
  if (out == nullptr) return invalid("out is null");
  return guarded([&] { *out = new malab_report{malab::presets_text(), "", "", true}; });
}

malab_status malab_verify(const char* out_dir, int workers, malab_verification** out) {
  if (out == nullptr) return invalid("out is null");
  return guarded([&] {
    const auto dir = malab::resolve_output_dir(out_dir ? std::optional<std::string>(out_dir) : std::nullopt);
    auto v = std::make_unique<malab_verification>();
    v->outcome = malab::run_verify(dir, workers);
    v->path = v->outcome.report_path.string();
    *out = v.release();
  });
}

int malab_verify_passed(const malab_verification* v) { return v && v->outcome.passed ? 1 : 0; }
const char* malab_verify_text(const malab_verification* v) { return v ? v->outcome.report_text.c_str() : ""; }
const char* malab_verify_path(const malab_verification* v) { return v ? v->path.c_str() : ""; }
size_t malab_verify_count(const malab_verification* v) { return v ? v->outcome.criteria.size() : 0; }

malab_status malab_verify_criterion(const malab_verification* v, size_t index, int* id, const char** title, int* passed,
                                    double* seconds, double* time_limit, const char** error) {
  if (v == nullptr) return invalid("verify handle is null");
  if (index >= v->outcome.criteria.size()) return invalid("criterion index out of range");
  const auto& c = v->outcome.criteria[index];
  if (id) *id = c.id;
  if (title) *title = c.title.c_str();
  if (passed) *passed = c.passed ? 1 : 0;
  if (seconds) *seconds = c.seconds;
  if (time_limit) *time_limit = c.time_limit;
  if (error) *error = c.error.c_str();
  return MALAB_OK;
}

void malab_verify_destroy(malab_verification* v) { delete v; }

}  // extern "C"
