// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "malab/error.hpp"
#include "malab/grid.hpp"
#include "malab/spectral.hpp"

namespace malab {

struct DensityReport {
  double min_value = 0.0;
  double mass_before = 0.0;  // grid quadrature of the input
  double rescale = 1.0;      // factor applied to reach unit mass
  bool rescaled = false;
};

/// Nonnegative right-hand side f with unit mass and integrability exponent p.
class Density {
 public:
  const TorusGrid& grid() const { return values_.grid(); }
  const GridFunction& values() const { return values_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double lp_norm() const { return lp_norm_; }
  const DensityReport& report() const { return report_; }

 private:
  friend Density validate_density(GridFunction values, double p);
  Density(GridFunction values, double p) : values_(std::move(values)), p_(p) {}

  GridFunction values_;
  double p_;
  double q_ = 0.0;
  double lp_norm_ = 0.0;
  DensityReport report_;
};

inline constexpr double kMassRescaleWindow = 0.01;

/// Checks f >= 0 and unit mass, rescaling when the mass is within 1%.
Density validate_density(GridFunction values, double p);

// (mean |f|^p)^{1/p}
double lp_norm(const GridFunction& f, double p);

struct SolverOptions {
  int max_iterations = 40;
  double residual_tolerance = 1e-10;
  double damping_factor = 0.5;  // step multiplier per backtrack
  int max_backtracks = 12;
  int max_linear_iterations = 200;
  double positivity_floor = 1e-12;  // min f below this selects the regularized path
  std::vector<double> regularization_ladder{1e-1, 1e-2, 1e-3};

  void validate() const;
};

struct LadderRung {
  double delta = 0.0;
  double residual = 0.0;
  double sup_gap = 0.0;  // ‖φ_δ − φ_{previous δ}‖_∞, 0 for the first rung
};

struct SolveResult {
  GridFunction phi;
  double residual = 0.0;  // ‖det(I + H(φ)) − f‖_∞ against the solved density
  double min_eigenvalue = 0.0;
  int newton_iterations = 0;
  int linear_iterations = 0;
  std::vector<double> residual_history{};
  std::string path{}; // "spectral", "newton" or "regularized"
  std::vector<LadderRung> ladder{};
  double extrapolated_gap = 0.0;  // Richardson tail estimate of ‖φ_δ − φ_0‖_∞
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, GridFunction best, double best_residual, std::vector<double> history)
      : Error(ErrorKind::Convergence, what),
        best_(std::move(best)),
        best_residual_(best_residual),
        history_(std::move(history)) {}
  const GridFunction& best_iterate() const { return best_; }
  double best_residual() const { return best_residual_; }
  const std::vector<double>& history() const { return history_; }

 private:
  GridFunction best_;
  double best_residual_;
  std::vector<double> history_;
};

/// Pointwise det(I + H(φ)).
GridFunction ma_operator(const GridFunction& phi);

/// φ − max φ.
GridFunction normalize_sup(const GridFunction& phi);

/// Exact spectral solve of 1 + ¼Δφ = f (n = 1), sup-normalized.
SolveResult solve_n1(const Density& f);

/// Damped Newton on det(I + H(φ)) = f for n ∈ {1, 2}.
SolveResult solve_ma(const Density& f, const SolverOptions& opts = {});

}  // namespace malab
