// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "malab/grid.hpp"

namespace malab {

using Spectrum = std::vector<std::complex<double>>;

/// Real-to-complex FFT over every real axis of a torus grid.
///
/// Plans are created with FFTW_ESTIMATE so that repeated runs choose the same
/// algorithm and produce bitwise-identical output. Plan creation is
/// serialized internally; executing distinct Transform objects from
/// different threads is safe.
class Transform {
 public:
  explicit Transform(const TorusGrid& grid);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  const TorusGrid& grid() const { return grid_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  // Unnormalized forward transform.
  void forward(std::span<const double> in, Spectrum& out);
  // Inverse transform including the 1/size normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

  // Calls fn(spectral_index, wavenumbers, nyquist_flags) for every retained
  // mode of the half-complex layout. Wavenumbers are signed integers.
  using ModeVisitor = std::function<void(std::size_t, const TorusGrid::Index&, const std::array<bool, 4>&)>;
  void for_each_mode(const ModeVisitor& fn) const;

 private:
  TorusGrid grid_;
  std::size_t spectrum_size_;
  double* real_buf_;
  void* complex_buf_;
  void* plan_forward_;
  void* plan_inverse_;
};

/// Complex Hessian H_{jk} = d^2 phi / dz_j d\bar z_k sampled on the grid.
/// For n = 1 only h11 is populated.
struct HessianField {
  TorusGrid grid;
  std::vector<double> h11;
  std::vector<double> h22;
  std::vector<double> h12_re;
  std::vector<double> h12_im;

  std::size_t size() const { return h11.size(); }
  // Smallest eigenvalue of I + H at point i.
  double min_eigenvalue_shifted(std::size_t i) const;
  // det(I + H) at point i.
  double shifted_determinant(std::size_t i) const;
};

/// Spectral complex Hessian: exact for band-limited phi. Pure second
/// derivatives keep the Nyquist mode, mixed derivatives drop it.
HessianField complex_hessian(const GridFunction& phi);

/// Minimum over the grid of the smallest eigenvalue of I + H(phi).
double min_shifted_eigenvalue(const HessianField& h);

/// Solves tr H(u) = (1/4) Laplacian(u) = rhs - mean(rhs) for the zero-mean u.
/// With drop_nyquist the solution carries no Nyquist content.
GridFunction inverse_trace_hessian(const GridFunction& rhs, bool drop_nyquist = false);

/// Removes every Fourier mode with a Nyquist component.
GridFunction drop_nyquist_modes(const GridFunction& f);

}  // namespace malab
