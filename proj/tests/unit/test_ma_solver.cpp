// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "malab/error.hpp"
#include "malab/ma_solver.hpp"
#include "malab/presets.hpp"
#include "malab/spectral.hpp"

using namespace malab;

namespace {

constexpr double kPi = std::numbers::pi;

Density density(const TorusGrid& g, const std::function<double(const TorusGrid::Point&)>& fn, double p = 2.0) {
  return validate_density(GridFunction::sample(g, fn), p);
}

double post_hoc_residual(const SolveResult& r, const Density& f) {
  return sup_distance(ma_operator(r.phi), f.values());
}

}  // namespace

TEST_SUITE("ma_solver") {
  TEST_CASE("Monge-Ampere operator") {
    const TorusGrid g1(1, 32);
    const GridFunction unit = ma_operator(GridFunction(g1, 0.0));
    for (double v : unit.values()) CHECK(v == 1.0);

    // Separable ψ: det(I + H) = (1 - π²a(cos 2πx₁ + cos 2πy₁))(1 - π²b cos 2πx₂).
    const double a = 0.01, b = 0.02;
    const TorusGrid g2(2, 8);
    const GridFunction psi = GridFunction::sample(g2, [&](const TorusGrid::Point& x) {
      return a * (std::cos(2 * kPi * x[0]) + std::cos(2 * kPi * x[1])) + b * std::cos(2 * kPi * x[2]);
    });
    const GridFunction f = ma_operator(psi);
    for (std::size_t i = 0; i < g2.size(); ++i) {
      const auto x = g2.coords(i);
      const double expect = (1 - kPi * kPi * a * (std::cos(2 * kPi * x[0]) + std::cos(2 * kPi * x[1]))) *
                            (1 - kPi * kPi * b * std::cos(2 * kPi * x[2]));
      CHECK(std::abs(f[i] - expect) <= 1e-10);
    }
  }

  TEST_CASE("density validation") {
    const TorusGrid g(1, 32);
    const Density one = density(g, [](const TorusGrid::Point&) { return 1.0; });
    CHECK(one.values().mean() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(one.lp_norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(one.q() == doctest::Approx(2.0));
    const Density wave = density(g, [](const TorusGrid::Point& x) { return 1.0 + 0.5 * std::cos(2 * kPi * x[0]); });
    CHECK(wave.report().mass_before == doctest::Approx(1.0).epsilon(1e-14));

    auto kind_of = [&](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::Io;
    };
    CHECK(kind_of([&] { density(g, [](const TorusGrid::Point&) { return 1.0; }, 1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([&] { density(g, [](const TorusGrid::Point& x) { return 1.0 + 2.0 * std::cos(2 * kPi * x[0]); }); }) ==
          ErrorKind::Contract);
    CHECK(kind_of([&] { density(g, [](const TorusGrid::Point&) { return 1.5; }); }) == ErrorKind::Contract);
    // Small mass drift is rescaled rather than rejected.
    const Density drift = density(g, [](const TorusGrid::Point&) { return 1.005; });
    CHECK(drift.report().rescaled);
    CHECK(drift.values().mean() == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("Lp norms of the mollified singular density follow the integrability threshold") {
    // ‖(ρ² + δ²)^{-s}‖_p stays bounded as δ → 0 iff p·s < 1.
    auto norm_at = [](int res, double s) {
      const TorusGrid g(1, res);
      const Json params = resolve_params(PresetFamily::Density, "mollified-singular", {{"s", s}}, 1);
      return build_density("mollified-singular", params, g).lp_norm();
    };
    const double bounded = norm_at(512, 0.3) / norm_at(128, 0.3);
    const double growing = norm_at(512, 0.7) / norm_at(128, 0.7);
    CHECK(bounded < 1.05);
    CHECK(growing > 1.3);
  }

  TEST_CASE("one-dimensional spectral solutions") {
    const TorusGrid g(1, 64);
    const Density one = density(g, [](const TorusGrid::Point&) { return 1.0; });
    for (double v : solve_n1(one).phi.values()) CHECK(v == 0.0);

    const double a = 0.5, b = -0.3;
    const Density f = density(g, [&](const TorusGrid::Point& x) {
      return 1.0 + a * std::cos(2 * kPi * x[0]) + b * std::sin(4 * kPi * x[1]);
    });
    const GridFunction exact = normalize_sup(GridFunction::sample(g, [&](const TorusGrid::Point& x) {
      return -(a / (kPi * kPi)) * std::cos(2 * kPi * x[0]) - (b / (4 * kPi * kPi)) * std::sin(4 * kPi * x[1]);
    }));
    const SolveResult r = solve_n1(f);
    CHECK(sup_distance(r.phi, exact) <= 1e-10);
    CHECK(r.residual <= 1e-10);

    const Density single = density(g, [&](const TorusGrid::Point& x) { return 1.0 + a * std::cos(2 * kPi * x[0]); });
    const GridFunction closed = GridFunction::sample(g, [&](const TorusGrid::Point& x) {
      return -(a / (kPi * kPi)) * std::cos(2 * kPi * x[0]) - std::abs(a) / (kPi * kPi);
    });
    CHECK(sup_distance(solve_n1(single).phi, closed) <= 1e-10);
  }

  TEST_CASE("Newton agrees with the spectral solver in one dimension") {
    const TorusGrid g(1, 128);
    const Json params = resolve_params(PresetFamily::Density, "mollified-singular", Json::object(), 1);
    const Density f = build_density("mollified-singular", params, g);
    const SolveResult newton = solve_ma(f);
    const SolveResult spectral = solve_n1(f);
    CHECK(newton.path == "newton");
    CHECK(sup_distance(newton.phi, spectral.phi) <= 1e-8);
    CHECK(newton.residual <= 1e-10);
    CHECK(post_hoc_residual(newton, f) <= 1e-10);
  }

  TEST_CASE("trivial density gives the zero potential") {
    for (int n : {1, 2}) {
      const TorusGrid g(n, 8);
      const SolveResult r = solve_ma(density(g, [](const TorusGrid::Point&) { return 1.0; }));
      CHECK(r.residual == 0.0);
      for (double v : r.phi.values()) CHECK(v == 0.0);
    }
  }

  TEST_CASE("manufactured solution is recovered in two dimensions") {
    const TorusGrid g(2, 16);
    const Json params = resolve_params(PresetFamily::Density, "manufactured", Json::object(), 2);
    const Density f = build_density("manufactured", params, g);
    const GridFunction psi = normalize_sup(manufactured_potential(params, g));
    const SolveResult r = solve_ma(f);
    CHECK(sup_distance(r.phi, psi) <= 1e-6);
    CHECK(r.residual <= 1e-10);
    CHECK(post_hoc_residual(r, f) <= 1e-10);
    CHECK(r.min_eigenvalue > 0.0);
    CHECK(r.phi.max() == 0.0);
    // Quadratic convergence: each accepted step at least squares the error scale.
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) CHECK(r.residual_history[i] < r.residual_history[i - 1]);
  }

  TEST_CASE("solutions move with their density") {
    const TorusGrid g(2, 8);
    const Json params = resolve_params(PresetFamily::Density, "manufactured", Json::object(), 2);
    const Density f = build_density("manufactured", params, g);
    const TorusGrid::Index shift{1, 3, -2, 5};
    const Density moved = validate_density(translate(f.values(), shift), 2.0);
    const SolveResult a = solve_ma(f), b = solve_ma(moved);
    CHECK(sup_distance(b.phi, translate(a.phi, shift)) <= 1e-10);
  }

  TEST_CASE("ordered densities coincide, and so do their solutions") {
    // Two validated densities with f ≤ g pointwise have equal mass, so f = g.
    const TorusGrid g(1, 64);
    const Density f = density(g, [](const TorusGrid::Point& x) { return 1.0 + 0.4 * std::sin(2 * kPi * x[1]); });
    const Density h = validate_density(f.values(), 3.0);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(f.values()[i] <= h.values()[i]);
    CHECK(sup_distance(solve_ma(f).phi, solve_ma(h).phi) <= 1e-8);
  }

  TEST_CASE("residual contract across presets") {
    for (int n : {1, 2}) {
      const TorusGrid g(n, n == 1 ? 64 : 32);
      for (const char* name : {"constant", "cosine-modes", "mollified-singular", "manufactured"}) {
        const Json params = resolve_params(PresetFamily::Density, name, Json::object(), n);
        const Density f = build_density(name, params, g);
        SolverOptions opts;
        opts.residual_tolerance = 1e-11;
        CAPTURE(name);
        CAPTURE(n);
        // Grid-scale densities in two dimensions carry Nyquist content that the
        // solver cannot match; those may fail, but never return a bad solution.
        const bool must_converge = n == 1 || std::string(name) != "mollified-singular";
        try {
          const SolveResult r = solve_ma(f, opts);
          CHECK(r.residual <= opts.residual_tolerance);
          CHECK(post_hoc_residual(r, f) <= 1e-10);
          CHECK(r.min_eigenvalue > 0.0);
        } catch (const ConvergenceError& e) {
          CHECK(!must_converge);
          CHECK(e.best_residual() > opts.residual_tolerance);
        }
      }
    }
  }

  TEST_CASE("degenerate densities use the regularization ladder") {
    const TorusGrid g(2, 32);
    GridFunction v = GridFunction::sample(g, [](const TorusGrid::Point& x) {
      const double c = std::cos(kPi * x[0]);
      return c * c * 2.0;
    });
    const Density f = validate_density(v, 2.0);
    REQUIRE(f.values().min() <= 1e-12);
    const SolveResult r = solve_ma(f);
    CHECK(r.path == "regularized");
    CHECK(r.ladder.size() == 3);
    CHECK(r.residual <= 1e-10);
    CHECK(r.min_eigenvalue > 0.0);
  }

  TEST_CASE("solver budget exhaustion reports the best iterate") {
    const TorusGrid g(2, 8);
    const Json params = resolve_params(PresetFamily::Density, "manufactured", Json::object(), 2);
    const Density f = build_density("manufactured", params, g);
    SolverOptions opts;
    opts.max_iterations = 1;
    try {
      solve_ma(f, opts);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.kind() == ErrorKind::Convergence);
      CHECK(!e.history().empty());
      CHECK(e.best_residual() > opts.residual_tolerance);
      CHECK(e.best_iterate().grid() == g);
    }
    opts.max_iterations = 40;
    opts.damping_factor = 1.5;
    CHECK_THROWS_AS(solve_ma(f, opts), Error);
  }

  TEST_CASE("sup normalization") {
    const TorusGrid g(1, 16);
    const GridFunction flat = normalize_sup(GridFunction(g, 5.0));
    for (double v : flat.values()) CHECK(v == 0.0);
    const GridFunction f = GridFunction::sample(g, [](const TorusGrid::Point& x) { return std::sin(7 * x[0]) + x[1] * 0.3; });
    const GridFunction once = normalize_sup(f);
    CHECK(once.max() == 0.0);
    const GridFunction twice = normalize_sup(once);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(twice[i] == once[i]);
  }
}
