// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "malab/error.hpp"

namespace malab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

}  // namespace

Transform::Transform(const TorusGrid& grid) : grid_(grid) {
  const int dims = grid.real_dims();
  const int N = grid.resolution();
  std::array<int, TorusGrid::kMaxRealDims> shape{};
  spectrum_size_ = 1;
  for (int d = 0; d < dims; ++d) {
    shape[d] = N;
    spectrum_size_ *= (d == dims - 1) ? static_cast<std::size_t>(N / 2 + 1) : static_cast<std::size_t>(N);
  }
  std::lock_guard lock(planner_mutex());
  real_buf_ = fftw_alloc_real(grid.size());
  auto* cbuf = fftw_alloc_complex(spectrum_size_);
  complex_buf_ = cbuf;
  if (real_buf_ == nullptr || cbuf == nullptr) fail(ErrorKind::Resolution, "FFT buffer allocation failed");
  plan_forward_ = fftw_plan_dft_r2c(dims, shape.data(), real_buf_, cbuf, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_c2r(dims, shape.data(), cbuf, real_buf_, FFTW_ESTIMATE);
}

Transform::~Transform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

void Transform::forward(std::span<const double> in, Spectrum& out) {
  std::copy(in.begin(), in.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  out.resize(spectrum_size_);
  std::memcpy(static_cast<void*>(out.data()), complex_buf_, spectrum_size_ * sizeof(fftw_complex));
}

void Transform::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  std::memcpy(complex_buf_, in.data(), spectrum_size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = real_buf_[i] * scale;
}

void Transform::for_each_mode(const ModeVisitor& fn) const {
  const int dims = grid_.real_dims();
  const int N = grid_.resolution();
  const int half = N / 2;
  auto signed_k = [&](int i) { return i <= half ? i : i - N; };
  TorusGrid::Index k{};
  std::array<bool, 4> nyq{};
  std::size_t s = 0;
  std::array<int, TorusGrid::kMaxRealDims> extent{};
  for (int d = 0; d < dims; ++d) extent[d] = (d == dims - 1) ? half + 1 : N;
  std::array<int, TorusGrid::kMaxRealDims> idx{};
  while (true) {
    for (int d = 0; d < dims; ++d) {
      k[d] = signed_k(idx[d]);
      nyq[d] = (idx[d] == half);
    }
    fn(s++, k, nyq);
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == extent[d]) idx[d--] = 0;
    if (d < 0) break;
  }
}

double HessianField::min_eigenvalue_shifted(std::size_t i) const {
  if (grid.n() == 1) return 1.0 + h11[i];
  const double a = 1.0 + h11[i];
  const double d = 1.0 + h22[i];
  const double b2 = h12_re[i] * h12_re[i] + h12_im[i] * h12_im[i];
  const double half_gap = 0.5 * (a - d);
  return 0.5 * (a + d) - std::sqrt(half_gap * half_gap + b2);
}

double HessianField::shifted_determinant(std::size_t i) const {
  if (grid.n() == 1) return 1.0 + h11[i];
  return (1.0 + h11[i]) * (1.0 + h22[i]) - (h12_re[i] * h12_re[i] + h12_im[i] * h12_im[i]);
}

HessianField complex_hessian(const GridFunction& phi) {
  const TorusGrid& grid = phi.grid();
  Transform fft(grid);
  Spectrum hat;
  fft.forward(phi.values(), hat);

  HessianField out{grid, {}, {}, {}, {}};
  Spectrum work(hat.size());
  auto apply = [&](auto multiplier, std::vector<double>& dst) {
    fft.for_each_mode([&](std::size_t s, const TorusGrid::Index& k, const std::array<bool, 4>& nyq) {
      work[s] = hat[s] * multiplier(k, nyq);
    });
    dst.resize(grid.size());
    fft.inverse(work, dst);
  };
  auto odd = [](int k, bool nyq) { return nyq ? 0.0 : static_cast<double>(k); };

  apply([](const TorusGrid::Index& k, const std::array<bool, 4>&) {
    return -kPi2 * (double(k[0]) * k[0] + double(k[1]) * k[1]);
  }, out.h11);
  if (grid.n() == 2) {
    apply([](const TorusGrid::Index& k, const std::array<bool, 4>&) {
      return -kPi2 * (double(k[2]) * k[2] + double(k[3]) * k[3]);
    }, out.h22);
    apply([&](const TorusGrid::Index& k, const std::array<bool, 4>& nyq) {
      return -kPi2 * (odd(k[0], nyq[0]) * odd(k[2], nyq[2]) + odd(k[1], nyq[1]) * odd(k[3], nyq[3]));
    }, out.h12_re);
    apply([&](const TorusGrid::Index& k, const std::array<bool, 4>& nyq) {
      return -kPi2 * (odd(k[0], nyq[0]) * odd(k[3], nyq[3]) - odd(k[1], nyq[1]) * odd(k[2], nyq[2]));
    }, out.h12_im);
  }
  return out;
}

double min_shifted_eigenvalue(const HessianField& h) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) m = std::min(m, h.min_eigenvalue_shifted(i));
  return m;
}

GridFunction inverse_trace_hessian(const GridFunction& rhs, bool drop_nyquist) {
  const TorusGrid& grid = rhs.grid();
  Transform fft(grid);
  Spectrum hat;
  fft.forward(rhs.values(), hat);
  fft.for_each_mode([&](std::size_t s, const TorusGrid::Index& k, const std::array<bool, 4>& nyq) {
    double k2 = 0.0;
    bool any_nyq = false;
    for (int d = 0; d < grid.real_dims(); ++d) {
      k2 += double(k[d]) * k[d];
      any_nyq = any_nyq || nyq[d];
    }
    if (k2 == 0.0 || (drop_nyquist && any_nyq)) {
      hat[s] = 0.0;
    } else {
      hat[s] /= -kPi2 * k2;
    }
  });
  GridFunction out(grid);
  fft.inverse(hat, out.values());
  return out;
}

GridFunction drop_nyquist_modes(const GridFunction& f) {
  const TorusGrid& grid = f.grid();
  Transform fft(grid);
  Spectrum hat;
  fft.forward(f.values(), hat);
  fft.for_each_mode([&](std::size_t s, const TorusGrid::Index&, const std::array<bool, 4>& nyq) {
    for (int d = 0; d < grid.real_dims(); ++d)
      if (nyq[d]) hat[s] = 0.0;
  });
  GridFunction out(grid);
  fft.inverse(hat, out.values());
  return out;
}

}  // namespace malab
