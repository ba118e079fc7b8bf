// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "malab/error.hpp"
#include "malab/rng.hpp"

namespace malab {

MetricSpec MetricSpec::flat(int n) {
  if (n < 1) fail(ErrorKind::Domain, "flat metric needs n >= 1");
  return MetricSpec(Kind::Flat, n);
}

MetricSpec MetricSpec::fubini_study_p1() {
  MetricSpec m(Kind::FubiniStudyP1, 1);
  m.half_width_ = 4.0;
  return m;
}

MetricSpec MetricSpec::fubini_study_p2() {
  MetricSpec m(Kind::FubiniStudyP2, 2);
  m.half_width_ = 4.0;
  return m;
}

MetricSpec MetricSpec::product(std::vector<MetricSpec> factors) {
  if (factors.empty()) fail(ErrorKind::Domain, "product metric needs at least one factor");
  int n = 0;
  for (const auto& f : factors) n += f.dim();
  MetricSpec m(Kind::Product, n);
  m.factors_ = std::move(factors);
  m.half_width_ = std::numeric_limits<double>::infinity();
  for (const auto& f : m.factors_) m.half_width_ = std::min(m.half_width_, f.half_width_);
  return m;
}

std::string MetricSpec::name() const {
  switch (kind_) {
    case Kind::Flat: return "flat(" + std::to_string(n_) + ")";
    case Kind::FubiniStudyP1: return "fs-p1";
    case Kind::FubiniStudyP2: return "fs-p2";
    case Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "," : "") + factors_[i].name();
      return s + ")";
    }
  }
  return "?";
}

MetricSpec MetricSpec::with_chart_half_width(double w) const {
  if (!(w > 0)) fail(ErrorKind::Domain, "chart half width must be positive");
  MetricSpec m = *this;
  m.half_width_ = w;
  for (auto& f : m.factors_) f = f.with_chart_half_width(w);
  return m;
}

MetricSpec MetricSpec::with_finite_differences(double h) const {
  if (!(h > 0)) fail(ErrorKind::Domain, "finite-difference step must be positive");
  MetricSpec m = *this;
  m.mode_ = DerivativeMode::FiniteDifference;
  m.fd_step_ = h;
  return m;
}

MetricSpec MetricSpec::with_analytic_derivatives() const {
  MetricSpec m = *this;
  m.mode_ = DerivativeMode::Analytic;
  return m;
}

bool MetricSpec::contains(const CVector& z) const {
  if (z.size() != n_) return false;
  for (int i = 0; i < n_; ++i)
    if (std::abs(z[i].real()) > half_width_ || std::abs(z[i].imag()) > half_width_) return false;
  return true;
}

namespace {

// Derivatives F', F'', F''', F'''' of the radial potential F(t), t = |z|².
struct RadialPotential {
  std::array<double, 4> d;
};

RadialPotential radial_potential(MetricSpec::Kind kind, double t) {
  if (kind == MetricSpec::Kind::Flat) return {{1.0, 0.0, 0.0, 0.0}};
  const double s = 1.0 / (1.0 + t);
  return {{s, -s * s, 2.0 * s * s * s, -6.0 * s * s * s * s}};
}

MetricJet empty_jet(int n) {
  MetricJet jet;
  jet.g = CMatrix::Zero(n, n);
  jet.dz.assign(n, CMatrix::Zero(n, n));
  jet.dzbar.assign(n, CMatrix::Zero(n, n));
  jet.ddbar.assign(n, std::vector<CMatrix>(n, CMatrix::Zero(n, n)));
  return jet;
}

// g_{ij̄} = F' δ_ij + F'' z̄_i z_j and its derivatives.
MetricJet radial_jet(MetricSpec::Kind kind, const CVector& z, bool derivatives) {
  const int n = static_cast<int>(z.size());
  const double t = z.squaredNorm();
  const auto [F1, F2, F3, F4] = radial_potential(kind, t).d;
  MetricJet jet = empty_jet(n);
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  auto zb = [&](int a) { return std::conj(z[a]); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jet.g(i, j) = F1 * delta(i, j) + F2 * zb(i) * z[j];
  if (!derivatives) return jet;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        jet.dz[k](i, j) = F2 * zb(k) * delta(i, j) + F3 * zb(k) * zb(i) * z[j] + F2 * zb(i) * delta(j, k);
        jet.dzbar[k](i, j) = F2 * z[k] * delta(i, j) + F3 * z[k] * zb(i) * z[j] + F2 * delta(i, k) * z[j];
      }
  // ddbar[k][m](i,j) = ∂_k ∂_m̄ g_{ij̄}
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          jet.ddbar[k][m](i, j) = F3 * z[m] * zb(k) * delta(i, j) + F2 * delta(k, m) * delta(i, j) +
                                  F4 * z[m] * zb(k) * zb(i) * z[j] +
                                  F3 * (delta(k, m) * zb(i) * z[j] + zb(k) * delta(i, m) * z[j]) +
                                  F3 * z[m] * zb(i) * delta(j, k) + F2 * delta(i, m) * delta(j, k);
        }
  return jet;
}

MetricJet analytic_jet(const MetricSpec& spec, const CVector& z, bool derivatives) {
  if (spec.kind() != MetricSpec::Kind::Product) return radial_jet(spec.kind(), z, derivatives);
  const int n = spec.dim();
  MetricJet jet = empty_jet(n);
  int offset = 0;
  for (const auto& factor : spec.factors()) {
    const int m = factor.dim();
    const MetricJet block = analytic_jet(factor, z.segment(offset, m), derivatives);
    jet.g.block(offset, offset, m, m) = block.g;
    if (derivatives) {
      for (int a = 0; a < m; ++a) {
        jet.dz[offset + a].block(offset, offset, m, m) = block.dz[a];
        jet.dzbar[offset + a].block(offset, offset, m, m) = block.dzbar[a];
        for (int b = 0; b < m; ++b) jet.ddbar[offset + a][offset + b].block(offset, offset, m, m) = block.ddbar[a][b];
      }
    }
    offset += m;
  }
  return jet;
}

// Perturbs real coordinate `axis` (2a -> Re z_a, 2a+1 -> Im z_a).
CVector nudge(const CVector& z, int axis, double h) {
  CVector out = z;
  const int a = axis / 2;
  out[a] += (axis % 2 == 0) ? cplx(h, 0.0) : cplx(0.0, h);
  return out;
}

MetricJet finite_difference_jet(const MetricSpec& spec, const CVector& z) {
  const int n = spec.dim();
  const double h = spec.fd_step();
  auto g = [&](const CVector& p) { return analytic_jet(spec, p, false).g; };
  MetricJet jet = empty_jet(n);
  jet.g = g(z);
  std::vector<CMatrix> first(2 * n);
  for (int u = 0; u < 2 * n; ++u) first[u] = (g(nudge(z, u, h)) - g(nudge(z, u, -h))) / (2.0 * h);
  auto second = [&](int u, int v) -> CMatrix {
    if (u == v) return (g(nudge(z, u, h)) - 2.0 * jet.g + g(nudge(z, u, -h))) / (h * h);
    return (g(nudge(nudge(z, u, h), v, h)) - g(nudge(nudge(z, u, h), v, -h)) - g(nudge(nudge(z, u, -h), v, h)) +
            g(nudge(nudge(z, u, -h), v, -h))) /
           (4.0 * h * h);
  };
  const cplx I(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    jet.dz[k] = 0.5 * (first[2 * k] - I * first[2 * k + 1]);
    jet.dzbar[k] = 0.5 * (first[2 * k] + I * first[2 * k + 1]);
  }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
      jet.ddbar[j][k] = 0.25 * (second(xj, xk) + second(yj, yk) + I * (second(xj, yk) - second(yj, xk)));
    }
  return jet;
}

void require_in_chart(const MetricSpec& spec, const CVector& z) {
  if (z.size() != spec.dim())
    fail(ErrorKind::Dimension, "point has dimension " + std::to_string(z.size()) + ", metric " + spec.name() +
                                   " has dimension " + std::to_string(spec.dim()));
  if (!spec.contains(z)) fail(ErrorKind::Domain, "point lies outside the chart of " + spec.name());
}

void require_positive_definite(const CMatrix& g, const MetricSpec& spec) {
  Eigen::LLT<CMatrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Metric, "metric " + spec.name() + " is not positive definite");
}

}  // namespace

CMatrix metric_at(const MetricSpec& spec, const CVector& z) {
  require_in_chart(spec, z);
  CMatrix g = analytic_jet(spec, z, false).g;
  require_positive_definite(g, spec);
  return g;
}

MetricJet metric_jet(const MetricSpec& spec, const CVector& z) {
  require_in_chart(spec, z);
  MetricJet jet = spec.derivative_mode() == DerivativeMode::Analytic ? analytic_jet(spec, z, true)
                                                                     : finite_difference_jet(spec, z);
  require_positive_definite(jet.g, spec);
  return jet;
}

CurvatureTensor::CurvatureTensor(int n, CVector point, std::shared_ptr<const MetricSpec> source)
    : n_(n), coeffs_(static_cast<std::size_t>(n) * n * n * n, cplx(0.0, 0.0)), point_(std::move(point)),
      source_(std::move(source)) {}

TangentPair make_tangent_pair(const CMatrix& g, CVector tau, CVector xi) {
  if (tau.size() != g.rows() || xi.size() != g.rows()) fail(ErrorKind::Dimension, "tangent vectors do not match metric");
  const cplx inner = tau.transpose() * g * xi.conjugate();
  return {std::move(tau), std::move(xi), inner};
}

CurvatureTensor chern_coefficients(const MetricSpec& spec, const CVector& z) {
  const MetricJet jet = metric_jet(spec, z);
  const int n = spec.dim();
  Eigen::FullPivLU<CMatrix> lu(jet.g);
  if (!lu.isInvertible()) fail(ErrorKind::Inversion, "metric matrix is singular at the requested point");
  const CMatrix inv = lu.inverse();  // g^{rp̄} = inv(p, r)
  CurvatureTensor t(n, z, std::make_shared<const MetricSpec>(spec));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          cplx c = -jet.ddbar[j][k](l, m);
          for (int r = 0; r < n; ++r)
            for (int p = 0; p < n; ++p) c += inv(p, r) * jet.dzbar[k](r, m) * jet.dz[j](l, p);
          t(j, k, l, m) = c;
        }
  return t;
}

cplx bisectional_form_complex(const CurvatureTensor& t, const CVector& tau, const CVector& xi) {
  const int n = t.dim();
  if (tau.size() != n || xi.size() != n)
    fail(ErrorKind::Dimension, "tangent vectors must have dimension " + std::to_string(n));
  cplx acc(0.0, 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const cplx tt = tau[j] * std::conj(tau[k]);
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) acc += t(j, k, l, m) * tt * xi[l] * std::conj(xi[m]);
    }
  return acc;
}

double bisectional_form(const CurvatureTensor& t, const TangentPair& pair) {
  return bisectional_form_complex(t, pair.tau, pair.xi).real();
}

double check_hermitian_symmetry(const CurvatureTensor& t) {
  const int n = t.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) worst = std::max(worst, std::abs(std::conj(t(k, l, i, j)) - t(l, k, j, i)));
  return worst;
}

double check_kahler_identities(const MetricSpec& spec, const CVector& z) {
  const MetricJet jet = metric_jet(spec, z);
  const int n = spec.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(jet.dz[k](i, j) - jet.dz[i](k, j)));
        worst = std::max(worst, std::abs(jet.dzbar[k](i, j) - jet.dzbar[j](i, k)));
      }
  return worst;
}

CMatrix unitary_frame(const CMatrix& g) {
  Eigen::LLT<CMatrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Metric, "metric is not positive definite");
  const CMatrix L = llt.matrixL();
  return L.inverse().transpose();
}

CurvatureTensor to_frame(const CurvatureTensor& t, const CMatrix& P) {
  const int n = t.dim();
  if (P.rows() != n || P.cols() != n) fail(ErrorKind::Dimension, "frame does not match tensor dimension");
  std::vector<cplx> cur(t.coeffs().begin(), t.coeffs().end());
  std::vector<cplx> next(cur.size());
  auto at = [n](int a, int b, int c, int d) { return ((std::size_t(a) * n + b) * n + c) * n + d; };
  // Contract one slot at a time; odd slots (k̄, m̄) take the conjugate frame.
  for (int slot = 0; slot < 4; ++slot) {
    std::fill(next.begin(), next.end(), cplx(0.0, 0.0));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            std::array<int, 4> dst{a, b, c, d};
            cplx acc(0.0, 0.0);
            for (int s = 0; s < n; ++s) {
              std::array<int, 4> src = dst;
              src[slot] = s;
              const cplx f = (slot % 2 == 0) ? P(s, dst[slot]) : std::conj(P(s, dst[slot]));
              acc += cur[at(src[0], src[1], src[2], src[3])] * f;
            }
            next[at(a, b, c, d)] = acc;
          }
    cur.swap(next);
  }
  CurvatureTensor out(n, t.point(), nullptr);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) out(a, b, c, d) = cur[at(a, b, c, d)];
  return out;
}

namespace {

constexpr std::uint64_t kStreamMu = 1;
constexpr std::uint64_t kStreamOrthogonal = 2;
constexpr std::uint64_t kStreamLemma = 3;
constexpr double kResampleFloor = 1e-6;

CVector gaussian_vector(CounterRng& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.complex_normal();
  return v;
}

CVector unit_vector(CounterRng& rng, int n) {
  CVector v = gaussian_vector(rng, n);
  while (v.norm() < kResampleFloor) v = gaussian_vector(rng, n);
  return v / v.norm();
}

double g_norm(const CMatrix& g, const CVector& v) {
  return std::sqrt(std::max(0.0, (v.transpose() * g * v.conjugate()).value().real()));
}

}  // namespace

double estimate_mu(const MetricSpec& spec, const CVector& z, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorKind::Domain, "estimate_mu needs at least one sample");
  const CMatrix g = metric_at(spec, z);
  const CurvatureTensor frame_tensor = to_frame(chern_coefficients(spec, z), unitary_frame(g));
  const int n = spec.dim();
  double mu = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, kStreamMu, i);
    const CVector tau = unit_vector(rng, n);
    const CVector xi = unit_vector(rng, n);
    mu = std::max(mu, std::abs(bisectional_form_complex(frame_tensor, tau, xi).real()));
  }
  return mu;
}

double check_orthogonal_nonneg(const MetricSpec& spec, const CVector& z, std::uint64_t samples,
                               std::uint64_t seed) {
  const CMatrix g = metric_at(spec, z);
  const CurvatureTensor t = chern_coefficients(spec, z);
  const int n = spec.dim();
  if (n < 2) {
    // On a curve no nonzero g-orthogonal pair exists; the condition is vacuous.
    return 0.0;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, kStreamOrthogonal, i);
    CVector tau = gaussian_vector(rng, n);
    tau /= g_norm(g, tau);
    CVector xi;
    for (;;) {
      xi = gaussian_vector(rng, n);
      const cplx proj = (xi.transpose() * g * tau.conjugate()).value();
      xi -= proj * tau;
      const double norm = g_norm(g, xi);
      if (norm >= kResampleFloor) {
        xi /= norm;
        break;
      }
    }
    worst = std::min(worst, bisectional_form(t, make_tangent_pair(g, tau, xi)));
  }
  return worst;
}

LemmaResult verify_lemma_inequality(const MetricSpec& spec, const CVector& z, std::span<const double> w_ladder,
                                    std::uint64_t samples, std::uint64_t seed, std::optional<double> constant) {
  if (w_ladder.empty()) fail(ErrorKind::Domain, "w ladder is empty");
  for (double w : w_ladder)
    if (!(w > 0.0)) fail(ErrorKind::Domain, "every |w| in the ladder must be positive");
  const CMatrix g = metric_at(spec, z);
  const CurvatureTensor frame_tensor = to_frame(chern_coefficients(spec, z), unitary_frame(g));
  const int n = spec.dim();

  LemmaResult result;
  result.mu = estimate_mu(spec, z, samples, seed);
  result.constant = constant.value_or(5.0 * result.mu * std::sqrt(result.mu));
  result.worst_margin = std::numeric_limits<double>::infinity();
  const double inv_two_pi = 0.5 / std::numbers::pi;

  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, kStreamLemma, i);
    const CVector tau = unit_vector(rng, n);
    CVector xi;
    if (i % 2 == 0) {
      xi = unit_vector(rng, n);
    } else {
      // Near-parallel draws probe the regime |<τ,ξ>| ~ 1 where the δ-term dominates.
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      const double spread = 0.5 * rng.uniform();
      xi = std::polar(1.0, phase) * tau + spread * unit_vector(rng, n);
      xi /= xi.norm();
    }
    const double form = bisectional_form_complex(frame_tensor, tau, xi).real();
    const double overlap = std::norm(tau.dot(xi));  // |Σ τ_i conj(ξ_i)|²
    for (double w : w_ladder) {
      const double margin = inv_two_pi * (form + overlap / (w * w)) + result.constant * w;
      if (margin < result.worst_margin) {
        result.worst_margin = margin;
        result.worst_w = w;
      }
    }
  }
  return result;
}

}  // namespace malab
