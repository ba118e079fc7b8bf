// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/smoothing.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "malab/error.hpp"
#include "malab/spectral.hpp"

namespace malab {

namespace {

struct Rule {
  std::vector<double> nodes;    // on (0, 1)
  std::vector<double> weights;  // sum to 1
};

template <unsigned Points>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, Points>;
  Rule r;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool centre = (Points % 2 == 1) && i == 0;
    r.nodes.push_back(0.5 + 0.5 * x[i]);
    r.weights.push_back(0.5 * w[i]);
    if (!centre) {
      r.nodes.push_back(0.5 - 0.5 * x[i]);
      r.weights.push_back(0.5 * w[i]);
    }
  }
  return r;
}

const Rule& stencil_rule(int n) {
  static const Rule r1 = make_rule<8>();
  static const Rule r2 = make_rule<8>();
  return n == 1 ? r1 : r2;
}

// The m-fold composite of a rule on (0, 1).
Rule composite(const Rule& base, int m) {
  if (m == 1) return base;
  Rule r;
  for (int k = 0; k < m; ++k)
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      r.nodes.push_back((k + base.nodes[i]) / m);
      r.weights.push_back(base.weights[i] / m);
    }
  return r;
}

// Narrow kernels get their cells split so the profile stays resolved.
int subdivisions(int n, double radius_cells) {
  const double wanted = n == 1 ? 16.0 : 8.0;
  const int cap = n == 1 ? 8 : 4;
  return std::clamp(static_cast<int>(std::ceil(wanted / radius_cells)), 1, cap);
}

const Rule& direct_rule(int n) {
  static const Rule r1 = make_rule<10>();
  static const Rule r2 = make_rule<8>();
  return n == 1 ? r1 : r2;
}

// Iterates over every tuple in [lo, hi]^dims (inclusive).
template <typename Fn>
void for_each_tuple(int dims, const TorusGrid::Index& lo, const TorusGrid::Index& hi, Fn&& fn) {
  TorusGrid::Index idx = lo;
  while (true) {
    fn(idx);
    int d = dims - 1;
    while (d >= 0 && ++idx[d] > hi[d]) {
      idx[d] = lo[d];
      --d;
    }
    if (d < 0) break;
  }
}

// Squared distance (in cell units) from point p to the box [c, c+1]^dims.
double box_distance2(int dims, const std::array<double, 4>& p, const TorusGrid::Index& c) {
  double s = 0.0;
  for (int d = 0; d < dims; ++d) {
    double gap = 0.0;
    if (p[d] < c[d]) gap = c[d] - p[d];
    else if (p[d] > c[d] + 1) gap = p[d] - (c[d] + 1);
    s += gap * gap;
  }
  return s;
}

// Calls fn(point_in_cell_units, weight_fraction, local_coords) for every
// tensor Gauss node in cell c.
template <typename Fn>
void for_each_gauss_node(int dims, const Rule& rule, const TorusGrid::Index& c, Fn&& fn) {
  const int q = static_cast<int>(rule.nodes.size());
  std::array<int, 4> g{};
  while (true) {
    std::array<double, 4> local{};
    std::array<double, 4> point{};
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      local[d] = rule.nodes[g[d]];
      point[d] = c[d] + local[d];
      w *= rule.weights[g[d]];
    }
    fn(point, w, local);
    int d = dims - 1;
    while (d >= 0 && ++g[d] == q) g[d--] = 0;
    if (d < 0) break;
  }
}

void check_eps(const TorusGrid& grid, double eps) {
  if (!(eps > 0.0) || eps >= 0.25) fail(ErrorKind::Domain, "smoothing radius must satisfy 0 < eps < 1/4");
  if (eps < 2.0 * grid.spacing() * (1.0 - 1e-12))
    fail(ErrorKind::Resolution, "smoothing radius " + std::to_string(eps) + " is below two grid spacings (" +
                                    std::to_string(2.0 * grid.spacing()) + ")");
}

constexpr double kDirectCostLimit = 1.5e8;

}  // namespace

Stencil build_stencil(const SmoothingKernel& kernel, const TorusGrid& grid, double eps) {
  if (kernel.n() != grid.n()) fail(ErrorKind::Dimension, "kernel and grid dimensions differ");
  check_eps(grid, eps);
  const int dims = grid.real_dims();
  const double h = grid.spacing();
  const double radius = eps / h;  // in cells
  const double radius2 = radius * radius;
  const int reach = static_cast<int>(std::ceil(radius)) + 1;
  const int width = 2 * reach + 1;
  const Rule rule = composite(stencil_rule(grid.n()), subdivisions(grid.n(), radius));
  const double cell_scale = std::pow(h / eps, dims);  // h^{2n} ε^{-2n}

  std::vector<double> dense(static_cast<std::size_t>(std::pow(width, dims)), 0.0);
  auto dense_index = [&](const TorusGrid::Index& o) {
    std::size_t k = 0;
    for (int d = 0; d < dims; ++d) k = k * width + static_cast<std::size_t>(o[d] + reach);
    return k;
  };

  // The kernel is even in every coordinate: integrate over the cells of the
  // positive orthant and reflect.
  TorusGrid::Index lo{}, hi{};
  for (int d = 0; d < dims; ++d) hi[d] = reach - 1;
  const std::array<double, 4> origin{};
  std::vector<double> half(dense.size(), 0.0);
  for_each_tuple(dims, lo, hi, [&](const TorusGrid::Index& c) {
    if (box_distance2(dims, origin, c) >= radius2) return;
    for_each_gauss_node(dims, rule, c, [&](const std::array<double, 4>& p, double w, const std::array<double, 4>& u) {
      double r2 = 0.0;
      for (int d = 0; d < dims; ++d) r2 += p[d] * p[d];
      const double chi = kernel.profile(r2 / radius2);
      if (chi == 0.0) return;
      const double mass = chi * w * cell_scale;
      for (int corner = 0; corner < (1 << dims); ++corner) {
        double tent = 1.0;
        TorusGrid::Index o = c;
        for (int d = 0; d < dims; ++d) {
          if (corner & (1 << d)) {
            tent *= u[d];
            o[d] += 1;
          } else {
            tent *= 1.0 - u[d];
          }
        }
        half[dense_index(o)] += mass * tent;
      }
    });
  });
  TorusGrid::Index qlo{}, qhi{};
  for (int d = 0; d < dims; ++d) {
    qlo[d] = -reach;
    qhi[d] = reach;
  }
  for_each_tuple(dims, qlo, qhi, [&](const TorusGrid::Index& o) {
    double w = 0.0;
    for (int signs = 0; signs < (1 << dims); ++signs) {
      TorusGrid::Index m{};
      bool inside = true;
      for (int d = 0; d < dims; ++d) {
        m[d] = (signs & (1 << d)) ? -o[d] : o[d];
        inside = inside && m[d] >= 0;
      }
      if (inside) w += half[dense_index(m)];
    }
    dense[dense_index(o)] = w;
  });

  Stencil s;
  TorusGrid::Index olo{}, ohi{};
  for (int d = 0; d < dims; ++d) {
    olo[d] = -reach;
    ohi[d] = reach;
  }
  for_each_tuple(dims, olo, ohi, [&](const TorusGrid::Index& o) {
    const double w = dense[dense_index(o)];
    if (w > 0.0) {
      s.offsets.push_back(o);
      s.weights.push_back(w);
    }
  });
  s.raw_mass = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  if (std::abs(s.raw_mass - 1.0) > 1e-6)
    fail(ErrorKind::Resolution, "stencil quadrature mass " + std::to_string(s.raw_mass) + " is not within 1e-6 of 1");
  for (double& w : s.weights) w /= s.raw_mass;
  // Make the in-order sum exactly 1 so constants pass through unchanged.
  const auto centre = std::max_element(s.weights.begin(), s.weights.end()) - s.weights.begin();
  for (int pass = 0; pass < 8; ++pass) {
    const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
    if (total == 1.0) break;
    s.weights[centre] += 1.0 - total;
  }
  return s;
}

GridFunction apply_stencil_direct(const GridFunction& f, const Stencil& stencil) {
  const TorusGrid& grid = f.grid();
  const int dims = grid.real_dims();
  const int N = grid.resolution();
  const std::size_t mask = static_cast<std::size_t>(N - 1);
  GridFunction out(grid);
  const auto values = f.values();
  // Per-entry offsets reduced mod N so inner loops only add and mask.
  std::vector<std::array<std::size_t, 4>> shifts(stencil.offsets.size());
  for (std::size_t s = 0; s < shifts.size(); ++s)
    for (int d = 0; d < dims; ++d)
      shifts[s][d] = static_cast<std::size_t>(((stencil.offsets[s][d] % N) + N) % N);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TorusGrid::Index idx = grid.unflatten(i);
    double acc = 0.0;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      std::size_t flat = 0;
      for (int d = 0; d < dims; ++d) flat = flat * N + ((static_cast<std::size_t>(idx[d]) + shifts[s][d]) & mask);
      acc += stencil.weights[s] * values[flat];
    }
    out[i] = acc;
  }
  return out;
}

GridFunction apply_stencil_fft(const GridFunction& f, const Stencil& stencil) {
  const TorusGrid& grid = f.grid();
  std::vector<double> kernel(grid.size(), 0.0);
  for (std::size_t s = 0; s < stencil.offsets.size(); ++s) kernel[grid.flatten(stencil.offsets[s])] += stencil.weights[s];
  Transform fft(grid);
  Spectrum fhat, khat;
  fft.forward(f.values(), fhat);
  fft.forward(kernel, khat);
  // Correlation: Σ_o w_o f(z + o) has transform f̂ · conj(ŵ).
  // The zero mode is left alone: the weights sum to one.
  for (std::size_t s = 1; s < fhat.size(); ++s) fhat[s] *= std::conj(khat[s]);
  GridFunction out(grid);
  fft.inverse(fhat, out.values());
  return out;
}

GridFunction apply_stencil(const GridFunction& f, const Stencil& stencil) {
  const double cost = static_cast<double>(stencil.offsets.size()) * static_cast<double>(f.size());
  return cost <= kDirectCostLimit ? apply_stencil_direct(f, stencil) : apply_stencil_fft(f, stencil);
}

GridFunction smooth(const GridFunction& phi, const SmoothingKernel& kernel, double eps) {
  return apply_stencil(phi, build_stencil(kernel, phi.grid(), eps));
}

double phi_zw(const GridFunction& phi, const SmoothingKernel& kernel, std::span<const double> z,
              std::complex<double> w) {
  const TorusGrid& grid = phi.grid();
  const int dims = grid.real_dims();
  if (kernel.n() != grid.n()) fail(ErrorKind::Dimension, "kernel and grid dimensions differ");
  if (static_cast<int>(z.size()) != dims) fail(ErrorKind::Dimension, "point has wrong dimension");
  const double modulus = std::abs(w);
  if (modulus == 0.0) return interpolate(phi, z);
  if (modulus >= 0.25) fail(ErrorKind::Domain, "|w| must be below 1/4");

  const double h = grid.spacing();
  const double radius = modulus / h;
  std::array<double, 4> centre{};
  TorusGrid::Index lo{}, hi{};
  for (int d = 0; d < dims; ++d) {
    centre[d] = z[d] / h;
    lo[d] = static_cast<int>(std::floor(centre[d] - radius)) - 1;
    hi[d] = static_cast<int>(std::floor(centre[d] + radius)) + 1;
  }
  const Rule& rule = direct_rule(grid.n());
  const double jacobian = std::pow(h / modulus, dims);  // dλ(ζ) = |w|^{-2n} dλ(y)
  double acc = 0.0, mass = 0.0;
  std::array<double, 4> point{};
  for_each_tuple(dims, lo, hi, [&](const TorusGrid::Index& c) {
    if (box_distance2(dims, centre, c) >= radius * radius) return;
    for_each_gauss_node(dims, rule, c, [&](const std::array<double, 4>& p, double weight, const std::array<double, 4>&) {
      // ζ = y / w coordinate-wise in C^n.
      double zeta2 = 0.0;
      std::array<std::complex<double>, 2> zeta{};
      for (int j = 0; j < grid.n(); ++j) {
        const std::complex<double> y((p[2 * j] - centre[2 * j]) * h, (p[2 * j + 1] - centre[2 * j + 1]) * h);
        zeta[j] = y / w;
        zeta2 += std::norm(zeta[j]);
      }
      const double chi = kernel.profile(zeta2);
      if (chi == 0.0) return;
      for (int j = 0; j < grid.n(); ++j) {
        const std::complex<double> moved = w * zeta[j];
        point[2 * j] = z[2 * j] + moved.real();
        point[2 * j + 1] = z[2 * j + 1] + moved.imag();
      }
      mass += weight * jacobian * chi;
      acc += weight * jacobian * chi * interpolate(phi, std::span<const double>(point.data(), dims));
    });
  });
  // Dividing by the discrete mass keeps constants exact.
  return acc / mass;
}

double quasi_psh_defect(const GridFunction& phi) { return min_shifted_eigenvalue(complex_hessian(phi)); }

namespace {

void check_ladder(std::span<const double> eps_ladder) {
  if (eps_ladder.empty()) fail(ErrorKind::Domain, "eps ladder is empty");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] > eps_ladder[i - 1])) fail(ErrorKind::Domain, "eps ladder must be strictly increasing");
}

void evaluate_ordering(SmoothedFamily& fam) {
  fam.ordering_holds = true;
  fam.worst_ordering_violation = -std::numeric_limits<double>::infinity();
  double needed = 0.0;
  for (std::size_t i = 0; i + 1 < fam.members.size(); ++i) {
    const double e0 = fam.eps_ladder[i];
    const double e1 = fam.eps_ladder[i + 1];
    const auto& a = fam.members[i];
    const auto& b = fam.members[i + 1];
    for (std::size_t p = 0; p < a.size(); ++p) {
      const double gap = (a[p] + fam.K * e0 * e0) - (b[p] + fam.K * e1 * e1);
      fam.worst_ordering_violation = std::max(fam.worst_ordering_violation, gap);
      needed = std::max(needed, (a[p] - b[p]) / (e1 * e1 - e0 * e0));
    }
  }
  if (fam.members.size() < 2) fam.worst_ordering_violation = 0.0;
  fam.ordering_holds = fam.worst_ordering_violation <= kOrderingSlack;
  fam.min_passing_K = needed;
}

}  // namespace

SmoothedFamily monotone_family(const GridFunction& phi, const SmoothingKernel& kernel,
                               std::span<const double> eps_ladder, double K) {
  check_ladder(eps_ladder);
  if (K < 0.0) fail(ErrorKind::Domain, "K must be nonnegative");
  SmoothedFamily fam{phi, {eps_ladder.begin(), eps_ladder.end()}, {}};
  fam.K = K;
  for (double eps : eps_ladder) fam.members.push_back(smooth(phi, kernel, eps));
  evaluate_ordering(fam);
  return fam;
}

SmoothedFamily normalized_family(const SmoothedFamily& family, double C, double C1) {
  if (C < 0.0 || C1 < 0.0) fail(ErrorKind::Domain, "C and C1 must be nonnegative");
  SmoothedFamily out = family;
  out.C = C;
  out.C1 = C1;
  out.normalized = true;
  const double top = family.base.max();
  out.shift = top > -1.0 ? -1.0 - top : 0.0;
  out.base += out.shift;
  if (out.base.max() > -1.0 + 1e-12) fail(ErrorKind::Contract, "base function is not <= -1 after the shift");

  const double base_sup = std::max(std::abs(out.base.max()), std::abs(out.base.min()));
  out.diagnostics.clear();
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    const double eps = out.eps_ladder[i];
    GridFunction shifted = family.members[i];
    shifted += out.shift;  // smoothing commutes with constants
    const double raw_sup = sup_distance(shifted, out.base);
    GridFunction normalized = shifted;
    normalized += C1 * eps * eps;
    normalized *= 1.0 / (1.0 + C * eps);
    MemberDiagnostics diag;
    diag.eps = eps;
    diag.psh_defect = quasi_psh_defect(normalized);
    normalized.set_psh_defect(diag.psh_defect);
    diag.sup_to_base = sup_distance(normalized, out.base);
    diag.l1_to_base = l1_distance(normalized, out.base);
    const double c2 = C * base_sup + C1 * eps;
    diag.sup_lower_bound = (raw_sup - c2 * eps) / (1.0 + C * eps);
    out.diagnostics.push_back(diag);
    out.members[i] = std::move(normalized);
  }
  out.decreasing_to_base = true;
  for (std::size_t i = 0; i + 1 < out.members.size(); ++i)
    for (std::size_t p = 0; p < out.base.size(); ++p)
      if (out.members[i][p] > out.members[i + 1][p] + kOrderingSlack) out.decreasing_to_base = false;
  return out;
}

std::vector<DecayRow> l1_sup_decay(const GridFunction& phi, const SmoothingKernel& kernel,
                                   std::span<const double> eps_ladder) {
  check_ladder(eps_ladder);
  std::vector<DecayRow> rows;
  for (double eps : eps_ladder) {
    const GridFunction smoothed = smooth(phi, kernel, eps);
    rows.push_back({eps, l1_distance(smoothed, phi), sup_distance(smoothed, phi)});
  }
  return rows;
}

std::vector<double> geometric_ladder(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) fail(ErrorKind::Domain, "geometric ladder needs 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * i);
  out.back() = hi;
  return out;
}

}  // namespace malab
