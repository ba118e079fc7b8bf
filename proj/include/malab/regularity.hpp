// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "malab/grid.hpp"
#include "malab/kernel.hpp"
#include "malab/ma_solver.hpp"

namespace malab {

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  int resolution = 0;
};

/// Rows of (scale, sup distance, l1 distance). For modulus tables the scale
/// is a radius, `sup` the largest oscillation and `l1` the mean oscillation.
struct DecayTable {
  std::vector<double> scale;
  std::vector<double> sup;
  std::vector<double> l1;
  Provenance provenance;

  std::size_t size() const { return scale.size(); }
  void validate() const;
};

enum class FitColumn { Sup, L1 };

struct ExponentFit {
  double alpha = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int rows_used = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kMinRSquared = 0.95;
inline constexpr double kHolderSlack = 0.05;

DecayTable smoothing_decay_experiment(const GridFunction& phi, const SmoothingKernel& kernel,
                                      const std::vector<double>& eps_ladder, Provenance provenance = {});

/// Least squares of log(distance) on log(scale) over rows with scale in
/// [window_lo, window_hi]. Nonpositive distances are skipped with a warning.
ExponentFit fit_exponent(const DecayTable& table, FitColumn which, double window_lo = 0.0,
                         double window_hi = std::numeric_limits<double>::infinity());

/// Default ε and radius ladder: 8 geometric points in [4h, 0.15].
std::vector<double> default_ladder(const TorusGrid& grid);
/// Snaps radii to whole grid steps, dropping duplicates.
std::vector<double> snap_radii(const TorusGrid& grid, const std::vector<double>& radii);
/// Lower edge of the fitting window: 8h.
double fit_floor(const TorusGrid& grid);

DecayTable modulus_of_continuity(const GridFunction& phi, const std::vector<double>& radii, Provenance provenance = {});

struct HolderVerdict {
  double alpha = 0.0;
  double threshold = 0.0;   // 1/(nq+1)
  double egz = 0.0;         // 2/(2+nq)
  double upper = 0.0;       // 2/(nq)
  double slack = kHolderSlack;
  bool pass = false;
  bool above_egz = false;
  bool above_upper = false;
};

HolderVerdict holder_consistency_check(const ExponentFit& fit, int n, double p, double slack = kHolderSlack);

struct StabilityRow {
  double t = 0.0;
  double l1 = 0.0;   // ‖f − g_t‖₁
  double sup = 0.0;  // ‖φ − ψ_t‖_∞ after balancing the constants
  double shift = 0.0;
};

struct StabilityReport {
  int n = 1;
  std::vector<StabilityRow> rows;
  ExponentFit fit;
  double target = 0.0;  // 1/(n + 0.1)
  double slack = kHolderSlack;
  bool pass = false;
  double base_residual = 0.0;
  double worst_residual = 0.0;
};

/// Solves for f and each g_t, balances sup(φ−ψ) = sup(ψ−φ), and fits the
/// slope of log‖φ−ψ_t‖_∞ against log‖f−g_t‖₁.
StabilityReport stability_experiment(const Density& f, const std::vector<std::pair<double, Density>>& family,
                                     const SolverOptions& opts, double slack = kHolderSlack);

/// Adds (sup(ψ−φ) − sup(φ−ψ))/2 to φ; returns the constant.
double balance_constants(GridFunction& phi, const GridFunction& psi);

struct SingularCase {
  GridFunction phi;
  Density density;
  double amplitude = 0.0;
};

/// φ = A (ρ² + δ²)^α around z0 with ρ a smooth periodic distance and δ = 4h,
/// scaled so that I + H(φ) ⪰ 1/2; f = det(I + H(φ)).
SingularCase singular_testcase(double alpha, int n, const TorusGrid& grid, double p,
                               const std::vector<double>& z0 = {});

/// Smooth periodic squared distance Σ sin²(π Δx)/π² from z0.
double periodic_distance2(const TorusGrid::Point& x, const std::vector<double>& z0, int dims);

}  // namespace malab
