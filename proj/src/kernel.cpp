// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/kernel.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "malab/error.hpp"

namespace malab {

std::string to_string(KernelKind kind) { return kind == KernelKind::Demailly ? "demailly" : "polynomial"; }

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "demailly") return KernelKind::Demailly;
  if (name == "polynomial") return KernelKind::Polynomial;
  fail(ErrorKind::Config, "unknown kernel '" + name + "' (expected demailly or polynomial)");
}

namespace {

double integrate_unit(const auto& fn, double a = 0.0, double b = 1.0) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(fn, a, b, 15, 1e-14);
}

// Volume element of the unit sphere in C^n = R^{2n}, after t = r²:
// ∫ f(‖ζ‖²) dλ = π^n / (n-1)! ∫_0^∞ f(t) t^{n-1} dt.
double radial_factor(int n) { return n == 1 ? std::numbers::pi : std::numbers::pi * std::numbers::pi; }

}  // namespace

double SmoothingKernel::raw(double t) const {
  if (t >= 1.0 || t < 0.0) return 0.0;
  const double s = 1.0 - t;
  if (kind_ == KernelKind::Polynomial) return s * s * s;
  return std::exp(-1.0 / s) / (s * s);
}

SmoothingKernel SmoothingKernel::make(KernelKind kind, int n) {
  if (n != 1 && n != 2) fail(ErrorKind::Domain, "kernels are provided for n = 1 and n = 2");
  SmoothingKernel k(kind, n);
  const double mass = radial_factor(n) * integrate_unit([&](double t) { return k.raw(t) * std::pow(t, n - 1); });
  k.normalization_ = 1.0 / mass;
  k.second_moment_ = k.normalization_ * radial_factor(n) *
                     integrate_unit([&](double t) { return k.raw(t) * std::pow(t, n); });

  return k;
}

double SmoothingKernel::profile(double t) const { return normalization_ * raw(t); }

double SmoothingKernel::chi1(double t) const {
  if (t >= 1.0) return 0.0;
  return -integrate_unit([&](double u) { return profile(u); }, std::max(t, 0.0), 1.0);
}

double SmoothingKernel::quadrature_total() const {
  // The profile is even in every coordinate: integrate over [0,1]^{2n}.
  using G = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> x, w;
  const int cells = n_ == 1 ? 16 : 8;
  for (int c = 0; c < cells; ++c)
    for (std::size_t i = 0; i < G::abscissa().size(); ++i)
      for (double sign : {1.0, -1.0}) {
        x.push_back((c + 0.5 + 0.5 * sign * G::abscissa()[i]) / cells);
        w.push_back(0.5 * G::weights()[i] / cells);
      }
  const int dims = 2 * n_;
  const int q = static_cast<int>(x.size());
  std::array<int, 4> idx{};
  double total = 0.0;
  while (true) {
    double r2 = 0.0, weight = 1.0;
    for (int d = 0; d < dims; ++d) {
      r2 += x[idx[d]] * x[idx[d]];
      weight *= w[idx[d]];
    }
    if (r2 < 1.0) total += weight * profile(r2);
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == q) idx[d--] = 0;
    if (d < 0) break;
  }
  return total * std::pow(2.0, dims);
}

}  // namespace malab
