// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "malab/error.hpp"
#include "malab/presets.hpp"
#include "malab/smoothing.hpp"
#include "malab/spectral.hpp"

namespace malab {

void DecayTable::validate() const {
  if (sup.size() != scale.size() || l1.size() != scale.size()) fail(ErrorKind::Dimension, "decay table columns differ in length");
  for (std::size_t i = 0; i < scale.size(); ++i) {
    if (!(scale[i] > 0.0)) fail(ErrorKind::Domain, "decay table scales must be positive");
    if (i > 0 && !(scale[i] > scale[i - 1])) fail(ErrorKind::Domain, "decay table scales must be strictly increasing");
    if (sup[i] < 0.0 || l1[i] < 0.0) fail(ErrorKind::Domain, "decay table distances must be nonnegative");
  }
}

DecayTable smoothing_decay_experiment(const GridFunction& phi, const SmoothingKernel& kernel,
                                      const std::vector<double>& eps_ladder, Provenance provenance) {
  DecayTable t;
  for (const DecayRow& r : l1_sup_decay(phi, kernel, eps_ladder)) {
    t.scale.push_back(r.eps);
    t.sup.push_back(r.sup);
    t.l1.push_back(r.l1);
  }
  t.provenance = std::move(provenance);
  t.provenance.resolution = phi.grid().resolution();
  t.validate();
  return t;
}

ExponentFit fit_exponent(const DecayTable& table, FitColumn which, double window_lo, double window_hi) {
  table.validate();
  const auto& column = which == FitColumn::Sup ? table.sup : table.l1;
  ExponentFit fit;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double s = table.scale[i];
    if (s < window_lo * (1.0 - 1e-12) || s > window_hi * (1.0 + 1e-12)) continue;
    if (!(column[i] > 0.0)) {
      fit.warnings.push_back("row at scale " + std::to_string(s) + " has nonpositive distance and was excluded");
      continue;
    }
    xs.push_back(std::log(s));
    ys.push_back(std::log(column[i]));
  }
  fit.rows_used = static_cast<int>(xs.size());
  if (xs.size() < 4)
    fail(ErrorKind::Fit, "exponent fit needs at least 4 usable rows, got " + std::to_string(xs.size()));
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.alpha * xs[i]);
    sse += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

std::vector<double> default_ladder(const TorusGrid& grid) {
  const double h = grid.spacing();
  double lo = 4.0 * h, hi = 0.15;
  if (lo > 0.5 * hi) {
    lo = 2.0 * h;
    hi = std::min(0.24, std::max(hi, 1.5 * lo));
  }
  if (lo >= hi) return {};  // grid too coarse for any admissible radius
  return geometric_ladder(lo, hi, 8);
}

double fit_floor(const TorusGrid& grid) { return 8.0 * grid.spacing(); }

std::vector<double> snap_radii(const TorusGrid& grid, const std::vector<double>& radii) {
  std::vector<double> out;
  for (double r : radii) {
    if (!(r > 0.0) || r >= 0.5) fail(ErrorKind::Domain, "radii must lie in (0, 1/2)");
    const double snapped = std::max(1.0, std::round(r / grid.spacing())) * grid.spacing();
    if (out.empty() || snapped > out.back()) out.push_back(snapped);
  }
  return out;
}

namespace {

constexpr double kModulusCostLimit = 4e9;

// fn(i, j) over all grid points i with j the index of i shifted by `offset`.
template <typename Fn>
void for_each_shift_pair(const TorusGrid& grid, const TorusGrid::Index& offset, Fn&& fn) {
  const int dims = grid.real_dims();
  const int N = grid.resolution();
  const int mask = N - 1;
  std::array<std::vector<std::size_t>, 4> table;
  std::size_t stride = 1;
  for (int d = dims - 1; d >= 0; --d) {
    table[d].resize(N);
    for (int i = 0; i < N; ++i) table[d][i] = static_cast<std::size_t>((i + offset[d]) & mask) * stride;
    stride *= N;
  }
  std::size_t i = 0;
  if (dims == 2) {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) fn(i++, table[0][a] + table[1][b]);
  } else {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c) {
          const std::size_t base = table[0][a] + table[1][b] + table[2][c];
          for (int e = 0; e < N; ++e) fn(i++, base + table[3][e]);
        }
  }
}

}  // namespace

DecayTable modulus_of_continuity(const GridFunction& phi, const std::vector<double>& radii, Provenance provenance) {
  const TorusGrid& grid = phi.grid();
  const std::vector<double> snapped = snap_radii(grid, radii);
  if (snapped.empty()) fail(ErrorKind::Domain, "radius ladder is empty");
  const int dims = grid.real_dims();
  const int reach = static_cast<int>(std::lround(snapped.back() / grid.spacing()));
  const long long reach2 = static_cast<long long>(reach) * reach;

  // Half of the ball: the first nonzero component is positive.
  std::vector<std::pair<long long, TorusGrid::Index>> offsets;
  TorusGrid::Index o{};
  for (int d = 0; d < dims; ++d) o[d] = -reach;
  while (true) {
    long long r2 = 0;
    int first = 0;
    for (int d = 0; d < dims; ++d) {
      r2 += static_cast<long long>(o[d]) * o[d];
      if (first == 0) first = o[d];
    }
    if (first > 0 && r2 <= reach2) offsets.emplace_back(r2, o);
    int d = dims - 1;
    while (d >= 0 && ++o[d] > reach) o[d--] = -reach;
    if (d < 0) break;
  }
  std::stable_sort(offsets.begin(), offsets.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (static_cast<double>(offsets.size()) * static_cast<double>(grid.size()) > kModulusCostLimit)
    fail(ErrorKind::Resolution, "modulus of continuity: radius ladder too large for this grid");

  DecayTable t;
  std::vector<double> osc(grid.size(), 0.0);
  const auto v = phi.values();
  std::size_t next = 0;
  double running_max = 0.0;
  for (double r : snapped) {
    const long long cells = std::lround(r / grid.spacing());
    while (next < offsets.size() && offsets[next].first <= cells * cells) {
      for_each_shift_pair(grid, offsets[next].second, [&](std::size_t i, std::size_t j) {
        const double diff = std::abs(v[j] - v[i]);
        if (diff > osc[i]) osc[i] = diff;
        if (diff > osc[j]) osc[j] = diff;
      });
      ++next;
    }
    double mean = 0.0;
    for (double x : osc) {
      running_max = std::max(running_max, x);
      mean += x;
    }
    t.scale.push_back(r);
    t.sup.push_back(running_max);
    t.l1.push_back(mean / static_cast<double>(osc.size()));
  }
  t.provenance = std::move(provenance);
  t.provenance.resolution = grid.resolution();
  return t;
}

HolderVerdict holder_consistency_check(const ExponentFit& fit, int n, double p, double slack) {
  if (!(p > 1.0)) fail(ErrorKind::Domain, "p must exceed 1");
  if (n < 1) fail(ErrorKind::Dimension, "n must be positive");
  const double q = p / (p - 1.0);
  const double nq = n * q;
  HolderVerdict v;
  v.alpha = fit.alpha;
  v.threshold = 1.0 / (nq + 1.0);
  v.egz = 2.0 / (2.0 + nq);
  v.upper = 2.0 / nq;
  v.slack = slack;
  v.pass = fit.alpha >= v.threshold - slack;
  v.above_egz = fit.alpha >= v.egz;
  v.above_upper = fit.alpha > v.upper;
  return v;
}

double balance_constants(GridFunction& phi, const GridFunction& psi) {
  double up = -std::numeric_limits<double>::infinity();
  double down = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    up = std::max(up, psi[i] - phi[i]);
    down = std::max(down, phi[i] - psi[i]);
  }
  const double c = 0.5 * (up - down);
  phi += c;
  return c;
}

StabilityReport stability_experiment(const Density& f, const std::vector<std::pair<double, Density>>& family,
                                     const SolverOptions& opts, double slack) {
  StabilityReport rep;
  rep.n = f.grid().n();
  rep.slack = slack;
  rep.target = 1.0 / (rep.n + 0.1);
  const SolveResult base = solve_ma(f, opts);
  rep.base_residual = base.residual;
  rep.worst_residual = base.residual;
  DecayTable table;
  for (const auto& [t, g] : family) {
    if (!(g.grid() == f.grid())) fail(ErrorKind::Dimension, "densities live on different grids");
    const SolveResult sol = solve_ma(g, opts);
    rep.worst_residual = std::max(rep.worst_residual, sol.residual);
    GridFunction phi = base.phi;
    StabilityRow row;
    row.t = t;
    row.shift = balance_constants(phi, sol.phi);
    row.sup = sup_distance(phi, sol.phi);
    row.l1 = l1_distance(f.values(), g.values());
    rep.rows.push_back(row);
    if (row.l1 > 0.0 && (table.scale.empty() || row.l1 > table.scale.back())) {
      table.scale.push_back(row.l1);
      table.sup.push_back(row.sup);
      table.l1.push_back(row.l1);
    }
  }
  rep.fit = fit_exponent(table, FitColumn::Sup);
  rep.pass = rep.fit.alpha >= rep.target - slack;
  return rep;
}

double periodic_distance2(const TorusGrid::Point& x, const std::vector<double>& z0, int dims) {
  double r2 = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double c = d < static_cast<int>(z0.size()) ? z0[d] : 0.5;
    const double s = std::sin(std::numbers::pi * (x[d] - c)) / std::numbers::pi;
    r2 += s * s;
  }
  return r2;
}

SingularCase singular_testcase(double alpha, int n, const TorusGrid& grid, double p, const std::vector<double>& z0) {
  if (grid.n() != n) fail(ErrorKind::Dimension, "grid dimension does not match n");
  if (!(p > 1.0)) fail(ErrorKind::Domain, "p must exceed 1");
  if (!(alpha > 0.0) || !(alpha < 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0, 1)");
  const double q = p / (p - 1.0);
  if (!(alpha > 1.0 / q))
    fail(ErrorKind::Contract, "alpha = " + std::to_string(alpha) + " gives a density outside L^p; need alpha > 1/q = " +
                                  std::to_string(1.0 / q));
  double amplitude = 0.0;
  GridFunction psi = holder_potential(alpha, grid, z0, 4.0, 0.5, &amplitude);
  GridFunction f = ma_operator(psi);
  return {psi, validate_density(std::move(f), p), amplitude};
}

}  // namespace malab
