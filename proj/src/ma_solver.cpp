// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/ma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace malab {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Linearization of det(I + H(φ)) at a fixed φ, composed with the inverse of
// the trace operator ¼Δ on the zero-mean subspace (Nyquist-free for n = 2).
class Linearization {
 public:
  explicit Linearization(const TorusGrid& grid) : grid_(grid), fft_(grid) {
    const int dims = grid.real_dims();
    k_.reserve(fft_.spectrum_size());
    nyq_.reserve(fft_.spectrum_size());
    fft_.for_each_mode([&](std::size_t, const TorusGrid::Index& k, const std::array<bool, 4>& nyq) {
      std::array<std::int16_t, 4> kk{};
      std::uint8_t mask = 0;
      for (int d = 0; d < dims; ++d) {
        kk[d] = static_cast<std::int16_t>(k[d]);
        if (nyq[d]) mask |= static_cast<std::uint8_t>(1u << d);
      }
      k_.push_back(kk);
      nyq_.push_back(mask);
    });
  }

  void set_point(HessianField&& h) {
    coeff_ = std::move(h);
    // Store adj(I + H): d on h11, a on h22, -b on the off-diagonal.
    if (grid_.n() == 2) {
      std::swap(coeff_.h11, coeff_.h22);
      for (std::size_t i = 0; i < coeff_.size(); ++i) {
        coeff_.h11[i] += 1.0;
        coeff_.h22[i] += 1.0;
      }
    }
  }

  // out = L[P⁻¹ y]
  void apply(const std::vector<double>& y, std::vector<double>& out) {
    fft_.forward(y, hat_);
    invert_trace(hat_);
    out.resize(grid_.size());
    if (grid_.n() == 1) {
      multiply(hat_, [](const std::array<std::int16_t, 4>& k, std::uint8_t) {
        return -kPi2 * (double(k[0]) * k[0] + double(k[1]) * k[1]);
      });
      fft_.inverse(work_, out);
      return;
    }
    tmp_.resize(grid_.size());
    auto odd = [](int k, std::uint8_t mask, int d) { return (mask >> d) & 1u ? 0.0 : static_cast<double>(k); };
    // d·δ11
    multiply(hat_, [](const std::array<std::int16_t, 4>& k, std::uint8_t) {
      return -kPi2 * (double(k[0]) * k[0] + double(k[1]) * k[1]);
    });
    fft_.inverse(work_, tmp_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeff_.h11[i] * tmp_[i];
    // a·δ22
    multiply(hat_, [](const std::array<std::int16_t, 4>& k, std::uint8_t) {
      return -kPi2 * (double(k[2]) * k[2] + double(k[3]) * k[3]);
    });
    fft_.inverse(work_, tmp_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff_.h22[i] * tmp_[i];
    // -2 Re(b̄ δ12)
    multiply(hat_, [&](const std::array<std::int16_t, 4>& k, std::uint8_t m) {
      return -kPi2 * (odd(k[0], m, 0) * odd(k[2], m, 2) + odd(k[1], m, 1) * odd(k[3], m, 3));
    });
    fft_.inverse(work_, tmp_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 2.0 * coeff_.h12_re[i] * tmp_[i];
    multiply(hat_, [&](const std::array<std::int16_t, 4>& k, std::uint8_t m) {
      return -kPi2 * (odd(k[0], m, 0) * odd(k[3], m, 3) - odd(k[1], m, 1) * odd(k[2], m, 2));
    });
    fft_.inverse(work_, tmp_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 2.0 * coeff_.h12_im[i] * tmp_[i];
  }

  // P⁻¹ y
  GridFunction precondition(const std::vector<double>& y) {
    fft_.forward(y, hat_);
    invert_trace(hat_);
    GridFunction out(grid_);
    fft_.inverse(hat_, out.values());
    return out;
  }

 private:
  void invert_trace(Spectrum& hat) const {
    const bool drop_nyq = grid_.n() == 2;
    const int dims = grid_.real_dims();
    for (std::size_t s = 0; s < hat.size(); ++s) {
      double k2 = 0.0;
      for (int d = 0; d < dims; ++d) k2 += double(k_[s][d]) * k_[s][d];
      if (k2 == 0.0 || (drop_nyq && nyq_[s] != 0)) {
        hat[s] = 0.0;
      } else {
        hat[s] /= -kPi2 * k2;
      }
    }
  }

  template <typename Fn>
  void multiply(const Spectrum& hat, Fn&& symbol) {
    work_.resize(hat.size());
    for (std::size_t s = 0; s < hat.size(); ++s) work_[s] = hat[s] * symbol(k_[s], nyq_[s]);
  }

  TorusGrid grid_;
  Transform fft_;
  std::vector<std::array<std::int16_t, 4>> k_;
  std::vector<std::uint8_t> nyq_;
  HessianField coeff_{grid_, {}, {}, {}, {}};
  Spectrum hat_, work_;
  std::vector<double> tmp_;
};

// Right-preconditioned BiCGSTAB on L P⁻¹ y = b. Returns iterations used.
// Components of b outside the range of L P⁻¹ make the residual plateau, so
// the loop also stops once five iterations fail to gain 1%.
int bicgstab(Linearization& op, const std::vector<double>& b, std::vector<double>& y, double rel_tol, int max_iter) {
  const std::size_t n = b.size();
  y.assign(n, 0.0);
  std::vector<double> r = b, r_hat = b, p(n, 0.0), v(n, 0.0), s(n), t(n);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) return 0;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  std::vector<double> recent;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = dot(r_hat, r);
    if (rho_new == 0.0) return it;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    op.apply(p, v);
    const double denom = dot(r_hat, v);
    if (denom == 0.0) return it;
    alpha = rho / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (std::sqrt(dot(s, s)) <= rel_tol * b_norm) {
      for (std::size_t i = 0; i < n; ++i) y[i] += alpha * p[i];
      return it;
    }
    op.apply(s, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    const double rel = std::sqrt(dot(r, r)) / b_norm;
    if (rel <= rel_tol || omega == 0.0) return it;
    recent.push_back(rel);
    if (recent.size() > 5 && rel > 0.99 * recent[recent.size() - 6]) return it;
  }
  return max_iter;
}

struct Evaluation {
  HessianField hessian;
  std::vector<double> residual;  // f − det(I + H)
  double sup = 0.0;
  double min_eig = 0.0;
};

Evaluation evaluate(const GridFunction& phi, const GridFunction& f) {
  Evaluation e{complex_hessian(phi), std::vector<double>(phi.size()), 0.0, 0.0};
  e.min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    e.residual[i] = f[i] - e.hessian.shifted_determinant(i);
    e.min_eig = std::min(e.min_eig, e.hessian.min_eigenvalue_shifted(i));
  }
  e.sup = sup_abs(e.residual);
  return e;
}

GridFunction initial_iterate(const GridFunction& f) {
  GridFunction rhs = f;
  rhs += -1.0;
  GridFunction phi = inverse_trace_hessian(rhs, f.grid().n() == 2);
  if (f.grid().n() == 1) return phi;
  for (int i = 0; i < 12; ++i) {
    if (min_shifted_eigenvalue(complex_hessian(phi)) > 0.0) return phi;
    phi *= 0.5;
  }
  return GridFunction(f.grid());
}

SolveResult newton(const GridFunction& f, GridFunction phi, const SolverOptions& opts) {
  const TorusGrid& grid = f.grid();
  const bool need_positive = grid.n() == 2;
  SolveResult out{GridFunction(grid)};
  out.path = "newton";
  Linearization lin(grid);
  Evaluation cur = evaluate(phi, f);
  if (need_positive && !(cur.min_eig > 0.0)) {
    phi = GridFunction(grid);
    cur = evaluate(phi, f);
  }
  out.residual_history.push_back(cur.sup);
  GridFunction best = phi;
  double best_res = cur.sup;

  for (int it = 0;; ++it) {
    if (cur.sup <= opts.residual_tolerance) break;
    if (it >= opts.max_iterations)
      throw ConvergenceError("Newton iteration did not reach the residual tolerance within " +
                                 std::to_string(opts.max_iterations) + " steps",
                             best, best_res, out.residual_history);
    const double res = cur.sup;
    std::vector<double> rhs = std::move(cur.residual);
    lin.set_point(std::move(cur.hessian));
    std::vector<double> y;
    const double rel_tol = std::clamp(res, 1e-10, 1e-2);
    out.linear_iterations += bicgstab(lin, rhs, y, rel_tol, opts.max_linear_iterations);
    const GridFunction delta = lin.precondition(y);
    y.clear();
    y.shrink_to_fit();

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, step *= opts.damping_factor) {
      GridFunction trial = phi;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += step * delta[i];
      Evaluation ev = evaluate(trial, f);
      const bool positive = !need_positive || ev.min_eig > 0.0;
      if (positive && ev.sup < (1.0 - 1e-4 * step) * res) {
        phi = std::move(trial);
        cur = std::move(ev);
        accepted = true;
        break;
      }
    }
    ++out.newton_iterations;
    if (!accepted)
      throw ConvergenceError("backtracking exhausted without reducing the residual", best, best_res,
                             out.residual_history);
    out.residual_history.push_back(cur.sup);
    if (cur.sup < best_res) {
      best = phi;
      best_res = cur.sup;
    }
  }
  out.residual = cur.sup;
  out.min_eigenvalue = cur.min_eig;
  out.phi = normalize_sup(phi);
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(residual_tolerance > 0.0)) fail(ErrorKind::Config, "residual tolerance must be positive");
  if (!(damping_factor > 0.0) || damping_factor > 1.0) fail(ErrorKind::Config, "damping factor must lie in (0, 1]");
  if (max_iterations < 0 || max_backtracks < 0 || max_linear_iterations < 1)
    fail(ErrorKind::Config, "iteration limits must be nonnegative");
  for (std::size_t i = 0; i < regularization_ladder.size(); ++i) {
    if (!(regularization_ladder[i] > 0.0)) fail(ErrorKind::Config, "regularization ladder entries must be positive");
    if (i > 0 && !(regularization_ladder[i] < regularization_ladder[i - 1]))
      fail(ErrorKind::Config, "regularization ladder must be strictly decreasing");
  }
}

double lp_norm(const GridFunction& f, double p) {
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

Density validate_density(GridFunction values, double p) {
  if (!(p > 1.0)) fail(ErrorKind::Domain, "integrability exponent p must exceed 1");
  DensityReport rep;
  rep.min_value = values.min();
  if (rep.min_value < -1e-12)
    fail(ErrorKind::Contract, "density takes negative value " + std::to_string(rep.min_value));
  for (double& v : values.values()) v = std::max(v, 0.0);
  rep.mass_before = values.mean();
  if (std::abs(rep.mass_before - 1.0) > kMassRescaleWindow)
    fail(ErrorKind::Contract, "density mass " + std::to_string(rep.mass_before) + " is not within 1% of 1");
  if (std::abs(rep.mass_before - 1.0) > 1e-15) {
    rep.rescale = 1.0 / rep.mass_before;
    rep.rescaled = true;
    values *= rep.rescale;
  }
  Density d(std::move(values), p);
  d.q_ = p / (p - 1.0);
  d.lp_norm_ = lp_norm(d.values_, p);
  d.report_ = rep;
  return d;
}

GridFunction ma_operator(const GridFunction& phi) {
  const HessianField h = complex_hessian(phi);
  GridFunction out(phi.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.shifted_determinant(i);
  return out;
}

GridFunction normalize_sup(const GridFunction& phi) {
  GridFunction out = phi;
  const double top = phi.max();
  for (double& v : out.values()) v -= top;
  return out;
}

SolveResult solve_n1(const Density& f) {
  if (f.grid().n() != 1) fail(ErrorKind::Dimension, "solve_n1 requires n = 1");
  GridFunction rhs = f.values();
  rhs += -1.0;
  SolveResult out{normalize_sup(inverse_trace_hessian(rhs))};
  out.path = "spectral";
  const HessianField h = complex_hessian(out.phi);
  out.min_eigenvalue = min_shifted_eigenvalue(h);
  for (std::size_t i = 0; i < h.size(); ++i)
    out.residual = std::max(out.residual, std::abs(h.shifted_determinant(i) - f.values()[i]));
  out.residual_history.push_back(out.residual);
  return out;
}

SolveResult solve_ma(const Density& f, const SolverOptions& opts) {
  opts.validate();
  const GridFunction& values = f.values();
  const bool degenerate = f.grid().n() == 2 && values.min() <= opts.positivity_floor;
  if (!degenerate) return newton(values, initial_iterate(values), opts);
  if (opts.regularization_ladder.empty())
    fail(ErrorKind::Contract, "density vanishes somewhere and no regularization ladder is configured");

  SolveResult out{GridFunction(f.grid())};
  GridFunction warm = initial_iterate(values);
  for (double delta : opts.regularization_ladder) {
    GridFunction fd = values;
    for (double& v : fd.values()) v = std::max(v, delta);
    fd = drop_nyquist_modes(fd);
    fd *= 1.0 / fd.mean();
    SolveResult rung = newton(fd, warm, opts);
    LadderRung r{delta, rung.residual, out.ladder.empty() ? 0.0 : sup_distance(rung.phi, out.phi)};
    out.ladder.push_back(r);
    out.newton_iterations += rung.newton_iterations;
    out.linear_iterations += rung.linear_iterations;
    out.residual_history.insert(out.residual_history.end(), rung.residual_history.begin(), rung.residual_history.end());
    out.residual = rung.residual;
    out.min_eigenvalue = rung.min_eigenvalue;
    warm = rung.phi;
    out.phi = std::move(rung.phi);
  }
  out.path = "regularized";
  if (out.ladder.size() >= 3) {
    const double last = out.ladder.back().sup_gap;
    const double prev = out.ladder[out.ladder.size() - 2].sup_gap;
    const double ratio = prev > 0.0 ? last / prev : 0.0;
    out.extrapolated_gap = ratio < 1.0 ? last * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace malab
