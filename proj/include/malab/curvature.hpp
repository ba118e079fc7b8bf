// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace malab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class DerivativeMode { Analytic, FiniteDifference };

/// An explicit Kähler metric g_{jk̄}(z) on a coordinate chart.
///
/// Flat(n) and the Fubini-Study charts are radial-potential metrics
/// g = ∂∂̄ F(|z|²) with F(t) = t or log(1 + t); on P¹ this gives
/// g = (1 + |z|²)^{-2}. Products are block diagonal with each block
/// depending only on its own coordinates.
class MetricSpec {
 public:
  enum class Kind { Flat, FubiniStudyP1, FubiniStudyP2, Product };

  static MetricSpec flat(int n);
  static MetricSpec fubini_study_p1();
  static MetricSpec fubini_study_p2();
  static MetricSpec product(std::vector<MetricSpec> factors);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const std::vector<MetricSpec>& factors() const { return factors_; }
  std::string name() const;

  // Chart domain: every real and imaginary coordinate part lies in
  // [-half_width, half_width].
  double chart_half_width() const { return half_width_; }
  MetricSpec with_chart_half_width(double w) const;

  DerivativeMode derivative_mode() const { return mode_; }
  double fd_step() const { return fd_step_; }
  MetricSpec with_finite_differences(double h = 1e-4) const;
  MetricSpec with_analytic_derivatives() const;

  bool contains(const CVector& z) const;

 private:
  MetricSpec(Kind kind, int n) : kind_(kind), n_(n) {}

  Kind kind_;
  int n_;
  std::vector<MetricSpec> factors_;
  double half_width_ = 1.0e6;
  DerivativeMode mode_ = DerivativeMode::Analytic;
  double fd_step_ = 1e-4;
};

/// Metric value and derivatives at a point:
///   dz[k](i,j)       = ∂g_{ij̄}/∂z_k
///   dzbar[k](i,j)    = ∂g_{ij̄}/∂z̄_k
///   ddbar[j][k](l,m) = ∂²g_{lm̄}/∂z_j∂z̄_k
struct MetricJet {
  CMatrix g;
  std::vector<CMatrix> dz;
  std::vector<CMatrix> dzbar;
  std::vector<std::vector<CMatrix>> ddbar;
};

CMatrix metric_at(const MetricSpec& spec, const CVector& z);
MetricJet metric_jet(const MetricSpec& spec, const CVector& z);

/// Chern curvature coefficients c_{jk̄lm̄} at a point.
class CurvatureTensor {
 public:
  CurvatureTensor(int n, CVector point, std::shared_ptr<const MetricSpec> source);

  int dim() const { return n_; }
  const CVector& point() const { return point_; }
  const MetricSpec* source() const { return source_.get(); }

  cplx& operator()(int j, int k, int l, int m) { return coeffs_[index(j, k, l, m)]; }
  cplx operator()(int j, int k, int l, int m) const { return coeffs_[index(j, k, l, m)]; }
  std::span<const cplx> coeffs() const { return coeffs_; }

 private:
  std::size_t index(int j, int k, int l, int m) const {
    return ((static_cast<std::size_t>(j) * n_ + k) * n_ + l) * n_ + m;
  }

  int n_;
  std::vector<cplx> coeffs_;
  CVector point_;
  std::shared_ptr<const MetricSpec> source_;
};

struct TangentPair {
  CVector tau;
  CVector xi;
  cplx inner;  // Σ g_{ij̄} τ_i conj(ξ_j)
};

TangentPair make_tangent_pair(const CMatrix& g, CVector tau, CVector xi);

/// c_{jk̄lm̄} = -g_{lm̄jk̄} + Σ_{r,p} g^{rp̄} g_{rm̄k̄} g_{lp̄j}, with g^{rp̄} the
/// entries of the inverse transposed metric matrix.
CurvatureTensor chern_coefficients(const MetricSpec& spec, const CVector& z);

/// Σ c_{jk̄lm̄} τ_j ξ_l conj(τ_k) conj(ξ_m), complex so callers can audit the
/// imaginary part.
cplx bisectional_form_complex(const CurvatureTensor& t, const CVector& tau, const CVector& xi);
double bisectional_form(const CurvatureTensor& t, const TangentPair& pair);

/// max |conj(c_{kl̄ij̄}) - c_{lk̄jī}|.
double check_hermitian_symmetry(const CurvatureTensor& t);

/// max violation of g_{ij̄k} = g_{kj̄i} and g_{ij̄k̄} = g_{ik̄j̄}.
double check_kahler_identities(const MetricSpec& spec, const CVector& z);

/// Frame P with Pᵀ g conj(P) = I, i.e. P = L^{-T} for the Cholesky factor
/// g = L L*. Vectors map as τ = P τ'.
CMatrix unitary_frame(const CMatrix& g);
/// Tensor expressed in the frame: c'(a,b,c,d) = Σ c(j,k,l,m) P_ja conj(P_kb) P_lc conj(P_md).
CurvatureTensor to_frame(const CurvatureTensor& t, const CMatrix& frame);

/// μ = max |iΘ(τ⊗ξ, τ⊗ξ)| over `samples` g-unit pairs; draw i depends only
/// on (seed, i).
double estimate_mu(const MetricSpec& spec, const CVector& z, std::uint64_t samples, std::uint64_t seed);

/// Minimum of the bisectional form over sampled g-orthogonal g-unit pairs.
double check_orthogonal_nonneg(const MetricSpec& spec, const CVector& z, std::uint64_t samples,
                               std::uint64_t seed);

struct LemmaResult {
  double worst_margin = 0.0;
  double mu = 0.0;
  double constant = 0.0;  // C used in the perturbation term
  double worst_w = 0.0;
};

/// Minimum over sampled unit (τ, ξ) and |w| in `w_ladder` of
///   (1/2π) Σ (c_{jk̄lm̄} + δ_jm δ_kl / |w|²) τ_j conj(τ_k) ξ_l conj(ξ_m) + C |w|,
/// evaluated in a unitary frame at z. C defaults to 5 μ^{3/2}.
LemmaResult verify_lemma_inequality(const MetricSpec& spec, const CVector& z, std::span<const double> w_ladder,
                                    std::uint64_t samples, std::uint64_t seed,
                                    std::optional<double> constant = std::nullopt);

}  // namespace malab
