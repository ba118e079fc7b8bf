// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "malab/error.hpp"
#include "malab/grid.hpp"
#include "malab/rng.hpp"
#include "malab/spectral.hpp"

using namespace malab;

TEST_SUITE("grid") {
  TEST_CASE("grid construction rejects bad shapes") {
    CHECK_THROWS_AS(TorusGrid(3, 16), Error);
    try {
      TorusGrid(1, 48);
      FAIL("expected a resolution error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Resolution);
    }
    const TorusGrid g(2, 8);
    CHECK(g.size() == 4096);
    CHECK(g.spacing() == 0.125);
  }

  TEST_CASE("flatten wraps indices periodically") {
    const TorusGrid g(1, 8);
    CHECK(g.flatten({-1, 0}) == g.flatten({7, 0}));
    CHECK(g.flatten({9, -8}) == g.flatten({1, 0}));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flatten(g.unflatten(i)) == i);
  }

  TEST_CASE("binary encoding round-trips every value bit for bit") {
    for (int n : {1, 2}) {
      const TorusGrid g(n, n == 1 ? 16 : 8);
      CounterRng rng(9, 0, static_cast<std::uint64_t>(n));
      GridFunction f(g);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.normal() * 1e3;
      const GridFunction back = decode_grid(encode_grid(f));
      REQUIRE(back.grid() == g);
      for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    }
    const auto path = std::filesystem::temp_directory_path() / "malab_grid_roundtrip.bin";
    const GridFunction f(TorusGrid(1, 4), 2.5);
    write_grid(f, path);
    CHECK(read_grid(path)[3] == 2.5);
    std::filesystem::remove(path);
  }

  TEST_CASE("truncated grid files are rejected") {
    auto bytes = encode_grid(GridFunction(TorusGrid(1, 4), 1.0));
    bytes.pop_back();
    CHECK_THROWS_AS(decode_grid(bytes), Error);
  }

  TEST_CASE("multilinear interpolation reproduces grid values and affine data") {
    const TorusGrid g(1, 16);
    const GridFunction f = GridFunction::sample(g, [](const TorusGrid::Point& x) { return std::sin(2 * std::numbers::pi * x[0]) + x[1]; });
    const double at[] = {g.coords(37)[0], g.coords(37)[1]};
    CHECK(interpolate(f, at) == doctest::Approx(f[37]).epsilon(1e-15));
    // Between two nodes along x₂ the data are affine in the cell interior.
    const double mid[] = {0.25, 0.03125 + 0.0625 * 0.25};
    const double expect = 1.0 + mid[1];
    CHECK(interpolate(f, mid) == doctest::Approx(expect).epsilon(1e-14));
  }

  TEST_CASE("translation moves values by the offset") {
    const TorusGrid g(1, 8);
    GridFunction f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
    const GridFunction t = translate(f, {1, 2});
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(t[i] == f[g.shifted(i, {1, 2})]);
  }

  TEST_CASE("complex Hessian of a single Fourier mode") {
    const TorusGrid g(1, 32);
    const double pi = std::numbers::pi;
    const GridFunction f = GridFunction::sample(g, [&](const TorusGrid::Point& x) { return std::cos(2 * pi * x[0]); });
    const HessianField h = complex_hessian(f);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(h.h11[i] == doctest::Approx(-pi * pi * f[i]).epsilon(1e-12).scale(1.0));
    const HessianField zero = complex_hessian(GridFunction(g, 4.0));
    for (double v : zero.h11) CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("complex Hessian of a separable n=2 potential is diagonal") {
    const TorusGrid g(2, 8);
    const double pi = std::numbers::pi;
    const GridFunction f = GridFunction::sample(g, [&](const TorusGrid::Point& x) {
      return 0.1 * std::cos(2 * pi * (x[0] + x[1])) + 0.05 * std::sin(2 * pi * x[3]);
    });
    const HessianField h = complex_hessian(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(h.h12_re[i]) < 1e-13);
      CHECK(std::abs(h.h12_im[i]) < 1e-13);
    }
  }

  TEST_CASE("inverse trace Hessian inverts the quarter Laplacian") {
    const TorusGrid g(1, 32);
    const double pi = std::numbers::pi;
    const GridFunction rhs = GridFunction::sample(g, [&](const TorusGrid::Point& x) {
      return 1.0 + 0.3 * std::cos(2 * pi * x[0]) - 0.2 * std::sin(4 * pi * x[1]);
    });
    const GridFunction u = inverse_trace_hessian(rhs);
    const HessianField h = complex_hessian(u);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(h.h11[i] == doctest::Approx(rhs[i] - 1.0).scale(1.0).epsilon(1e-12));
  }
}
