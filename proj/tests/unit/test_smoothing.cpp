// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "malab/error.hpp"
#include "malab/kernel.hpp"
#include "malab/presets.hpp"
#include "malab/regularity.hpp"
#include "malab/rng.hpp"
#include "malab/smoothing.hpp"

using namespace malab;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction sine(const TorusGrid& g, double amp = 1.0) {
  return GridFunction::sample(g, [&](const TorusGrid::Point& x) { return amp * std::sin(2 * kPi * x[0]); });
}

// ω-psh on the flat torus: I + H ⪰ 1/2.
GridFunction psh_modes(const TorusGrid& g) {
  return GridFunction::sample(g, [&](const TorusGrid::Point& x) {
    double v = 0.03 * std::cos(2 * kPi * x[0]) + 0.02 * std::sin(2 * kPi * (x[0] + x[1]));
    if (g.n() == 2) v += 0.02 * std::cos(2 * kPi * (x[1] - x[2])) + 0.01 * std::cos(2 * kPi * x[3]);
    return v;
  });
}

GridFunction noise(const TorusGrid& g, std::uint64_t seed) {
  CounterRng rng(seed, 0, 0);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.normal();
  return f;
}

const SmoothingKernel& demailly(int n) {
  static const SmoothingKernel k1 = SmoothingKernel::make(KernelKind::Demailly, 1);
  static const SmoothingKernel k2 = SmoothingKernel::make(KernelKind::Demailly, 2);
  return n == 1 ? k1 : k2;
}

}  // namespace

TEST_SUITE("smoothing") {
  TEST_CASE("constants are fixed points on both application paths") {
    for (int n : {1, 2}) {
      const TorusGrid g(n, n == 1 ? 128 : 16);
      const GridFunction c(g, -1.0);
      for (double eps : n == 1 ? std::vector<double>{0.05, 0.15} : std::vector<double>{0.13, 0.2}) {
        const Stencil s = build_stencil(demailly(n), g, eps);
        for (const GridFunction& out : {smooth(c, demailly(n), eps), apply_stencil_direct(c, s), apply_stencil_fft(c, s)})
          for (double v : out.values()) REQUIRE(v == -1.0);
      }
    }
  }

  TEST_CASE("stencil weights are nonnegative and integrate to one") {
    for (int n : {1, 2})
      for (KernelKind kind : {KernelKind::Demailly, KernelKind::Polynomial}) {
        const TorusGrid g(n, n == 1 ? 256 : 32);
        const Stencil s = build_stencil(SmoothingKernel::make(kind, n), g, 3.0 * g.spacing());
        CHECK(std::abs(s.raw_mass - 1.0) <= 1e-6);
        for (double w : s.weights) CHECK(w >= 0.0);
      }
  }

  TEST_CASE("direct and FFT application agree") {
    const TorusGrid g(1, 64);
    const GridFunction f = noise(g, 1);
    const Stencil s = build_stencil(demailly(1), g, 0.1);
    CHECK(sup_distance(apply_stencil_direct(f, s), apply_stencil_fft(f, s)) < 1e-13);
  }

  TEST_CASE("smoothing is linear, monotone and commutes with shifts and translations") {
    const TorusGrid g(1, 64);
    const GridFunction a = noise(g, 2), b = noise(g, 3);
    const double eps = 0.08;
    const GridFunction sa = smooth(a, demailly(1), eps), sb = smooth(b, demailly(1), eps);
    const GridFunction combo = smooth(2.5 * a + (-0.75) * b, demailly(1), eps);
    CHECK(sup_distance(combo, 2.5 * sa + (-0.75) * sb) <= 1e-10 * 4.0);

    GridFunction upper = a;
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] = std::max(a[i], b[i]);
    const GridFunction su = smooth(upper, demailly(1), eps);
    for (std::size_t i = 0; i < su.size(); ++i) CHECK(su[i] >= sa[i]);

    GridFunction shifted = a;
    shifted += 3.25;
    GridFunction expect = sa;
    expect += 3.25;
    CHECK(sup_distance(smooth(shifted, demailly(1), eps), expect) <= 1e-14);

    const TorusGrid::Index offset{5, -3};
    const GridFunction moved = smooth(translate(a, offset), demailly(1), eps);
    const GridFunction expected = translate(sa, offset);
    for (std::size_t i = 0; i < moved.size(); ++i) CHECK(moved[i] == expected[i]);
  }

  TEST_CASE("sup decay of a smooth function is quadratic") {
    const TorusGrid g(1, 256);
    const std::vector<double> ladder = geometric_ladder(0.02, 0.1, 5);
    const auto rows = l1_sup_decay(sine(g), demailly(1), ladder);
    DecayTable t;
    for (const auto& r : rows) {
      t.scale.push_back(r.eps);
      t.sup.push_back(r.sup);
      t.l1.push_back(r.l1);
    }
    const ExponentFit fit = fit_exponent(t, FitColumn::Sup);
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(fit.alpha - 2.0) <= 0.1);
    const auto flat = l1_sup_decay(GridFunction(g, 0.7), demailly(1), ladder);
    for (const auto& r : flat) {
      CHECK(r.sup <= 1e-14);
      CHECK(r.l1 <= 1e-14);
    }
  }

  TEST_CASE("phi_zw is radial and matches the stencil at grid points") {
    const TorusGrid g(1, 128);
    const GridFunction f = sine(g);
    const GridFunction s = smooth(f, demailly(1), 0.05);
    CounterRng rng(8, 0, 0);
    for (int probe = 0; probe < 100; ++probe) {
      const std::size_t idx = rng.next() % g.size();
      const auto z = g.coords(idx);
      const std::span<const double> zs(z.data(), 2);
      double lo = 1e300, hi = -1e300;
      for (int j = 0; j < 8; ++j) {
        const double v = phi_zw(f, demailly(1), zs, std::polar(0.05, 2 * kPi * j / 8));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        CHECK(std::abs(v - s[idx]) <= 1e-8);
      }
      CHECK(hi - lo <= 1e-8);
    }
    const double z0[] = {0.31, 0.77};
    CHECK(phi_zw(GridFunction(g, 2.0), demailly(1), z0, {0.03, 0.04}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(phi_zw(f, demailly(1), z0, 0.0) == interpolate(f, z0));
  }

  TEST_CASE("phi_zw in two dimensions") {
    const TorusGrid g(2, 16);
    const GridFunction f = psh_modes(g);
    const GridFunction s = smooth(f, demailly(2), 0.15);
    const std::size_t idx = 1234;
    const auto z = g.coords(idx);
    const std::span<const double> zs(z.data(), 4);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < 8; ++j) {
      const double v = phi_zw(f, demailly(2), zs, std::polar(0.15, 2 * kPi * j / 8));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo <= 1e-8);
    CHECK(std::abs(lo - s[idx]) <= 1e-8);
  }

  TEST_CASE("psh defect") {
    const TorusGrid g(1, 64);
    CHECK(quasi_psh_defect(GridFunction(g, 3.0)) == doctest::Approx(1.0).epsilon(1e-14));
    const GridFunction f = GridFunction::sample(g, [](const TorusGrid::Point& x) {
      return (std::cos(2 * kPi * x[0]) - 1.0) / (8 * kPi * kPi);
    });
    CHECK(std::abs(quasi_psh_defect(f) - 0.875) <= 1e-8);
  }

  TEST_CASE("flat smoothing preserves omega-psh functions") {
    for (int n : {1, 2}) {
      const TorusGrid g(n, n == 1 ? 128 : 16);
      const GridFunction f = psh_modes(g);
      REQUIRE(quasi_psh_defect(f) >= 0.0);
      for (double eps : {0.13, 0.2}) CHECK(quasi_psh_defect(smooth(f, demailly(n), eps)) >= -1e-6);
    }
    const TorusGrid g(1, 256);
    const Json params = resolve_params(PresetFamily::Function, "mollified-singular", Json::object(), 1);
    const GridFunction singular = build_function("mollified-singular", params, g);
    REQUIRE(quasi_psh_defect(singular) >= 0.0);
    CHECK(quasi_psh_defect(smooth(singular, demailly(1), 0.05)) >= -1e-6);
  }

  TEST_CASE("monotone family ordering") {
    const TorusGrid g(1, 128);
    const std::vector<double> ladder = geometric_ladder(0.04, 0.15, 8);
    const SmoothedFamily fam = monotone_family(psh_modes(g), demailly(1), ladder, 10.0);
    CHECK(fam.ordering_holds);
    CHECK(fam.worst_ordering_violation <= kOrderingSlack);
    // Without the ε² correction the ordering breaks; the reported threshold repairs it.
    const SmoothedFamily bare = monotone_family(psh_modes(g), demailly(1), ladder, 0.0);
    CHECK(!bare.ordering_holds);
    CHECK(bare.min_passing_K > 0.0);
    CHECK(bare.min_passing_K <= 10.0);
    CHECK(monotone_family(psh_modes(g), demailly(1), ladder, bare.min_passing_K * (1.0 + 1e-6) + 1e-9).ordering_holds);
    CHECK(!monotone_family(psh_modes(g), demailly(1), ladder, bare.min_passing_K * 0.9).ordering_holds);

    const SmoothedFamily constant = monotone_family(GridFunction(g, -2.0), demailly(1), ladder, 0.0);
    CHECK(constant.ordering_holds);
    for (const auto& m : constant.members)
      for (double v : m.values()) CHECK(v == -2.0);

    const GridFunction bad = GridFunction::sample(g, [](const TorusGrid::Point& x) { return -std::sin(4 * kPi * x[0]); });
    REQUIRE(quasi_psh_defect(bad) < 0.0);
    const SmoothedFamily loose = monotone_family(bad, demailly(1), ladder, 0.0);
    CHECK(loose.members.size() == ladder.size());
    CHECK(loose.ordering_holds == (loose.worst_ordering_violation <= kOrderingSlack));
  }

  TEST_CASE("normalized family") {
    const TorusGrid g(1, 128);
    GridFunction f = psh_modes(g);
    f += -1.0 - f.max();
    const std::vector<double> ladder = geometric_ladder(0.04, 0.15, 5);
    const SmoothedFamily fam = monotone_family(f, demailly(1), ladder, 10.0);
    const SmoothedFamily same = normalized_family(fam, 0.0, 0.0);
    CHECK(same.shift == 0.0);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      CHECK(sup_distance(same.members[i], fam.members[i]) == 0.0);
      CHECK(same.diagnostics[i].psh_defect >= 0.0);
    }
    const SmoothedFamily norm = normalized_family(monotone_family(psh_modes(g), demailly(1), ladder, 10.0), 1.0, 1.0);
    CHECK(norm.shift < 0.0);
    CHECK(norm.base.max() <= -1.0 + 1e-12);
    for (const auto& d : norm.diagnostics) CHECK(d.sup_to_base >= d.sup_lower_bound - 1e-12);
    CHECK_THROWS_AS(normalized_family(fam, -1.0, 0.0), Error);
  }

  TEST_CASE("radius limits") {
    const TorusGrid g(1, 64);
    const GridFunction f(g, 0.0);
    CHECK_THROWS_AS(smooth(f, demailly(1), 0.3), Error);
    try {
      smooth(f, demailly(1), 0.02);
      FAIL("expected a resolution error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resolution);
    }
    CHECK_THROWS_AS(smooth(GridFunction(TorusGrid(2, 16)), demailly(1), 0.15), Error);
  }
}
