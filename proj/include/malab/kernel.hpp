// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace malab {

enum class KernelKind {
  Demailly,    // C (1-t)^{-2} exp(1/(t-1)) on [0,1)
  Polynomial,  // C (1-t)^3 on [0,1), cross-check kernel
};

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

/// Radial cut-off χ(‖ζ‖²) normalized so that ∫_{C^n} χ(‖ζ‖²) dλ = 1.
class SmoothingKernel {
 public:
  static SmoothingKernel make(KernelKind kind, int n);

  KernelKind kind() const { return kind_; }
  int n() const { return n_; }

  // Normalized profile χ(t); zero for t >= 1.
  double profile(double t) const;
  // χ₁(t) = -∫_t^∞ χ(u) du; nonpositive, zero for t >= 1.
  double chi1(double t) const;
  // Constant multiplying the raw profile.
  double normalization() const { return normalization_; }
  // ∫ ‖ζ‖² χ(‖ζ‖²) dλ(ζ): the ε² coefficient of (‖z‖²)_ε − ‖z‖².
  double second_moment() const { return second_moment_; }

  // ∫χ over the cube [-1,1]^{2n} by composite tensor Gauss-Legendre,
  // independent of the radial integral used for the normalization.
  double quadrature_total() const;

 private:
  SmoothingKernel(KernelKind kind, int n) : kind_(kind), n_(n) {}
  double raw(double t) const;

  KernelKind kind_;
  int n_;
  double normalization_ = 1.0;
  double second_moment_ = 0.0;
};

}  // namespace malab
