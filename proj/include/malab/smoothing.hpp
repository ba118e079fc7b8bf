// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "malab/grid.hpp"
#include "malab/kernel.hpp"

namespace malab {

/// Discrete form of φ ↦ ∫ I[φ](z + y) χ_ε(y) dy, where I is periodic
/// multilinear interpolation and χ_ε(y) = ε^{-2n} χ(‖y‖²/ε²). Each weight is
/// the integral of χ_ε against the tent function of one grid offset, so all
/// weights are nonnegative and sum to one.
struct Stencil {
  std::vector<TorusGrid::Index> offsets;
  std::vector<double> weights;
  double raw_mass = 0.0;  // Σ weights before renormalization
};

Stencil build_stencil(const SmoothingKernel& kernel, const TorusGrid& grid, double eps);

// result(z) = Σ_o w_o f(z + o h). The direct path sums each output point in
// stencil order; the FFT path is used when the direct cost is large.
GridFunction apply_stencil(const GridFunction& f, const Stencil& stencil);
GridFunction apply_stencil_direct(const GridFunction& f, const Stencil& stencil);
GridFunction apply_stencil_fft(const GridFunction& f, const Stencil& stencil);

/// φ_ε on the flat torus. Requires 0 < eps < 1/4 and eps >= 2 h.
GridFunction smooth(const GridFunction& phi, const SmoothingKernel& kernel, double eps);

/// Φ(z, w) = ∫ I[φ](z + wζ) χ(‖ζ‖²) dλ(ζ) by direct quadrature at an
/// arbitrary point z (2n real coordinates). Φ(z, 0) = φ(z).
double phi_zw(const GridFunction& phi, const SmoothingKernel& kernel, std::span<const double> z,
              std::complex<double> w);

/// Min over the grid of the smallest eigenvalue of I + H(φ).
double quasi_psh_defect(const GridFunction& phi);

struct MemberDiagnostics {
  double eps = 0.0;
  double psh_defect = 0.0;
  double sup_to_base = 0.0;  // ‖member − φ‖_∞
  double l1_to_base = 0.0;
  // Lower bound (‖φ_ε − φ‖_∞ − C₂ε)/(1 + Cε) with C₂ = C‖φ‖_∞ + C₁ε.
  double sup_lower_bound = 0.0;
};

struct SmoothedFamily {
  GridFunction base;
  std::vector<double> eps_ladder;
  std::vector<GridFunction> members;
  double K = 10.0;
  double C = 1.0;
  double C1 = 1.0;
  double K_prime = 0.0;  // recorded only
  double shift = 0.0;    // constant added to the input before normalization
  bool normalized = false;

  // Ordering of φ_ε + K ε² along the ladder.
  bool ordering_holds = true;
  double worst_ordering_violation = 0.0;  // max_z,i (φ_i + Kε_i²) − (φ_{i+1} + Kε_{i+1}²)
  double min_passing_K = 0.0;             // smallest K ≥ 0 making the ordering hold

  // Populated by normalized_family.
  std::vector<MemberDiagnostics> diagnostics{};
  bool decreasing_to_base = true;  // members nondecreasing in ε
};

inline constexpr double kOrderingSlack = 1e-9;

SmoothedFamily monotone_family(const GridFunction& phi, const SmoothingKernel& kernel,
                               std::span<const double> eps_ladder, double K);

/// φ̃_ε = (φ_ε + C₁ε²)/(1 + Cε) after shifting the base so that φ ≤ −1.
SmoothedFamily normalized_family(const SmoothedFamily& family, double C, double C1);

struct DecayRow {
  double eps;
  double l1;
  double sup;
};

std::vector<DecayRow> l1_sup_decay(const GridFunction& phi, const SmoothingKernel& kernel,
                                   std::span<const double> eps_ladder);

/// Geometric ladder of `count` points in [lo, hi].
std::vector<double> geometric_ladder(double lo, double hi, int count);

}  // namespace malab
