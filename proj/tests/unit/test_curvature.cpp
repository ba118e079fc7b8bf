// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"
#include "malab/curvature.hpp"
#include "malab/error.hpp"
#include "malab/rng.hpp"

using namespace malab;

namespace {

CVector point(std::initializer_list<cplx> v) {
  CVector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx c : v) z(i++) = c;
  return z;
}

CVector random_vector(CounterRng& rng, int n, double scale = 1.0) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.complex_normal();
  return v;
}

std::vector<MetricSpec> curved_metrics() {
  return {MetricSpec::fubini_study_p1(), MetricSpec::fubini_study_p2(),
          MetricSpec::product({MetricSpec::fubini_study_p1(), MetricSpec::fubini_study_p1()}),
          MetricSpec::product({MetricSpec::fubini_study_p2(), MetricSpec::fubini_study_p1()})};
}

double max_abs(const CurvatureTensor& t) {
  double m = 0.0;
  for (cplx c : t.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("metric values in the chart") {
    const CMatrix g = metric_at(MetricSpec::flat(2), point({{0.7, -0.2}, {3.0, 1.0}}));
    CHECK((g - CMatrix::Identity(2, 2)).norm() == 0.0);
    CHECK(metric_at(MetricSpec::fubini_study_p1(), point({0.0})) (0, 0) == cplx(1.0, 0.0));
    CHECK(std::abs(metric_at(MetricSpec::fubini_study_p1(), point({1.0}))(0, 0) - 0.25) < 1e-15);
  }

  TEST_CASE("frozen coefficients of fs-p2 at a fixed point") {
    const CurvatureTensor t = chern_coefficients(MetricSpec::fubini_study_p2(), point({{0.3, 0.2}, {-0.5, 0.1}}));
    CHECK(t(0, 0, 0, 0).real() == doctest::Approx(0.850573572335685).epsilon(1e-12));
    CHECK(std::abs(t(0, 0, 0, 0).imag()) < 1e-14);
    for (auto idx : {std::array{0, 1, 1, 0}, std::array{0, 0, 1, 1}, std::array{1, 0, 0, 1}})
      CHECK(t(idx[0], idx[1], idx[2], idx[3]).real() == doctest::Approx(0.3904623453755651).epsilon(1e-12));
    CHECK(std::abs(t(0, 1, 0, 1).real()) < 1e-14);
    CHECK(t(0, 1, 0, 1).imag() == doctest::Approx(-0.018108709211984222).epsilon(1e-12));
  }

  TEST_CASE("fs-p1 at the origin has coefficient 2") {
    const CurvatureTensor t = chern_coefficients(MetricSpec::fubini_study_p1(), point({0.0}));
    CHECK(std::abs(t(0, 0, 0, 0) - cplx(2.0, 0.0)) < 1e-13);
    const CVector one = point({1.0});
    const TangentPair pair = make_tangent_pair(metric_at(MetricSpec::fubini_study_p1(), point({0.0})), one, one);
    CHECK(bisectional_form(t, pair) == doctest::Approx(2.0).epsilon(1e-13));
  }

  TEST_CASE("finite-difference derivatives agree with the analytic coefficients") {
    const MetricSpec fd = MetricSpec::fubini_study_p2().with_finite_differences(1e-4);
    const CVector z = point({{0.3, 0.2}, {-0.5, 0.1}});
    const CurvatureTensor a = chern_coefficients(MetricSpec::fubini_study_p2(), z);
    const CurvatureTensor b = chern_coefficients(fd, z);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) diff = std::max(diff, std::abs(a.coeffs()[i] - b.coeffs()[i]));
    CHECK(diff < 1e-6);
    CHECK(check_hermitian_symmetry(b) <= 10.0 * 1e-8);
  }

  TEST_CASE("flat metrics have vanishing curvature everywhere") {
    CounterRng rng(3, 0, 0);
    for (int n : {1, 2, 3}) {
      const CurvatureTensor t = chern_coefficients(MetricSpec::flat(n), random_vector(rng, n, 2.0));
      CHECK(max_abs(t) == 0.0);
      CHECK(check_hermitian_symmetry(t) == 0.0);
      CHECK(check_kahler_identities(MetricSpec::flat(n), random_vector(rng, n)) == 0.0);
      const TangentPair pair = make_tangent_pair(CMatrix::Identity(n, n), random_vector(rng, n), random_vector(rng, n));
      CHECK(bisectional_form(t, pair) == 0.0);
    }
  }

  TEST_CASE("product metrics do not couple their factors") {
    const MetricSpec spec = MetricSpec::product({MetricSpec::flat(1), MetricSpec::fubini_study_p1()});
    const CurvatureTensor t = chern_coefficients(spec, point({{0.2, 0.1}, {0.4, -0.3}}));
    auto factor = [](int i) { return i == 0 ? 0 : 1; };
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            if (!(factor(j) == factor(k) && factor(k) == factor(l) && factor(l) == factor(m)))
              CHECK(std::abs(t(j, k, l, m)) < 1e-14);
    CHECK(std::abs(t(0, 0, 0, 0)) == 0.0);
    CHECK(std::abs(t(1, 1, 1, 1)) > 0.1);
  }

  TEST_CASE("curvature identities hold at seeded chart points") {
    for (const MetricSpec& spec : curved_metrics()) {
      for (std::uint64_t i = 0; i < 25; ++i) {
        CounterRng rng(4, 0, i);
        const CVector z = random_vector(rng, spec.dim(), 0.8);
        const CurvatureTensor t = chern_coefficients(spec, z);
        CHECK(check_hermitian_symmetry(t) <= 1e-10);
        CHECK(check_kahler_identities(spec, z) <= 1e-10);
        const cplx form = bisectional_form_complex(t, random_vector(rng, spec.dim()), random_vector(rng, spec.dim()));
        CHECK(std::abs(form.imag()) <= 1e-10 * std::max(1.0, std::abs(form)));
      }
    }
  }

  TEST_CASE("bisectional form scales as |a|^2 |b|^2") {
    CounterRng rng(5, 0, 0);
    for (const MetricSpec& spec : curved_metrics()) {
      const CVector z = random_vector(rng, spec.dim(), 0.5);
      const CurvatureTensor t = chern_coefficients(spec, z);
      const CVector tau = random_vector(rng, spec.dim()), xi = random_vector(rng, spec.dim());
      const cplx a(0.3, -1.7), b(2.2, 0.4);
      const double base = bisectional_form_complex(t, tau, xi).real();
      const double scaled = bisectional_form_complex(t, a * tau, b * xi).real();
      CHECK(scaled == doctest::Approx(std::norm(a) * std::norm(b) * base).epsilon(1e-12));
    }
  }

  TEST_CASE("mu estimates") {
    CHECK(estimate_mu(MetricSpec::flat(2), point({0.1, 0.2}), 1000, 1) == 0.0);
    CHECK(estimate_mu(MetricSpec::fubini_study_p1(), point({0.0}), 1000, 1) == doctest::Approx(2.0).epsilon(1e-12));
    const MetricSpec p2 = MetricSpec::fubini_study_p2();
    const CVector z = point({{0.3, 0.2}, {-0.5, 0.1}});
    const double a = estimate_mu(p2, z, 2000, 17);
    CHECK(a == estimate_mu(p2, z, 2000, 17));
    CHECK(estimate_mu(p2, z, 4000, 17) >= a);
    CHECK(a > 0.0);
  }

  TEST_CASE("orthogonal bisectional curvature is nonnegative") {
    CHECK(check_orthogonal_nonneg(MetricSpec::flat(2), point({0.1, 0.2}), 1000, 1) == 0.0);
    const CVector z2 = point({{0.3, 0.2}, {-0.5, 0.1}});
    CHECK(check_orthogonal_nonneg(MetricSpec::fubini_study_p2(), z2, 100000, 2) >= -1e-8);
    const MetricSpec prod = MetricSpec::product({MetricSpec::fubini_study_p1(), MetricSpec::fubini_study_p1()});
    CHECK(check_orthogonal_nonneg(prod, z2, 100000, 2) >= -1e-8);
  }

  TEST_CASE("perturbed form stays nonnegative and improves with the constant") {
    const std::vector<double> ladder{0.5, 0.1, 0.01};
    for (const MetricSpec& spec : {MetricSpec::fubini_study_p1(), MetricSpec::fubini_study_p2()}) {
      CVector z(spec.dim());
      z(0) = cplx(0.3, 0.2);
      if (spec.dim() == 2) z(1) = cplx(-0.5, 0.1);
      const LemmaResult r = verify_lemma_inequality(spec, z, ladder, 100000, 42);
      CHECK(r.worst_margin >= -1e-8);
      CHECK(r.constant == doctest::Approx(5.0 * r.mu * std::sqrt(r.mu)).epsilon(1e-15));
      const LemmaResult doubled = verify_lemma_inequality(spec, z, ladder, 100000, 42, 2.0 * r.constant);
      CHECK(doubled.worst_margin >= r.worst_margin);
    }
  }

  TEST_CASE("unitary frame orthonormalizes the metric") {
    CounterRng rng(6, 0, 0);
    const MetricSpec spec = MetricSpec::fubini_study_p2();
    const CMatrix g = metric_at(spec, random_vector(rng, 2, 0.7));
    const CMatrix p = unitary_frame(g);
    CHECK((p.transpose() * g * p.conjugate() - CMatrix::Identity(2, 2)).norm() < 1e-13);
  }
}
