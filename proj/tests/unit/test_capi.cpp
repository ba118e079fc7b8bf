// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "malab/malab.h"

namespace fs = std::filesystem;

TEST_SUITE("capi") {
  TEST_CASE("version and status names") {
    CHECK(std::strlen(malab_version()) > 0);
    CHECK(std::string(malab_status_name(MALAB_OK)) == "ok");
    CHECK(std::string(malab_status_name(MALAB_ERR_DOMAIN)) == "domain error");
  }

  TEST_CASE("grid handles") {
    malab_grid* g = nullptr;
    REQUIRE(malab_grid_create(1, 32, &g) == MALAB_OK);
    int n = 0, res = 0;
    size_t size = 0;
    REQUIRE(malab_grid_shape(g, &n, &res, &size) == MALAB_OK);
    CHECK(n == 1);
    CHECK(res == 32);
    CHECK(size == 1024);
    double* v = nullptr;
    REQUIRE(malab_grid_values(g, &v) == MALAB_OK);
    for (size_t i = 0; i < size; ++i) v[i] = -2.0;

    malab_grid* s = nullptr;
    REQUIRE(malab_smooth(g, MALAB_KERNEL_DEMAILLY, 0.1, &s) == MALAB_OK);
    double* sv = nullptr;
    REQUIRE(malab_grid_values(s, &sv) == MALAB_OK);
    for (size_t i = 0; i < size; ++i) CHECK(std::abs(sv[i] + 2.0) <= 1e-14);
    double defect = 0.0;
    REQUIRE(malab_psh_defect(s, &defect) == MALAB_OK);
    CHECK(defect == doctest::Approx(1.0));

    const fs::path path = fs::temp_directory_path() / "malab-capi.grid";
    REQUIRE(malab_grid_write(s, path.string().c_str()) == MALAB_OK);
    malab_grid* back = nullptr;
    REQUIRE(malab_grid_read(path.string().c_str(), &back) == MALAB_OK);
    double* bv = nullptr;
    REQUIRE(malab_grid_values(back, &bv) == MALAB_OK);
    CHECK(std::memcmp(bv, sv, size * sizeof(double)) == 0);
    fs::remove(path);

    malab_grid_destroy(back);
    malab_grid_destroy(s);
    malab_grid_destroy(g);
    malab_grid_destroy(nullptr);
  }

  TEST_CASE("errors map to status codes") {
    malab_grid* g = nullptr;
    REQUIRE(malab_grid_create(1, 32, &g) == MALAB_OK);
    malab_grid* s = nullptr;
    CHECK(malab_smooth(g, MALAB_KERNEL_DEMAILLY, 1.0, &s) == MALAB_ERR_DOMAIN);
    CHECK(s == nullptr);
    CHECK(std::strlen(malab_last_error()) > 0);
    CHECK(malab_grid_create(1, 0, &s) != MALAB_OK);
    CHECK(malab_smooth(nullptr, MALAB_KERNEL_DEMAILLY, 0.1, &s) == MALAB_ERR_INVALID_ARGUMENT);
    CHECK(malab_grid_read("/nonexistent/grid.bin", &s) == MALAB_ERR_IO);
    malab_grid_destroy(g);
  }

  TEST_CASE("solver through the C interface") {
    malab_grid* f = nullptr;
    REQUIRE(malab_grid_create(1, 64, &f) == MALAB_OK);
    double* v = nullptr;
    REQUIRE(malab_grid_values(f, &v) == MALAB_OK);
    for (size_t i = 0; i < 64 * 64; ++i) v[i] = 1.0;
    malab_grid* phi = nullptr;
    double residual = -1.0;
    REQUIRE(malab_solve(f, 2.0, 1e-10, &phi, &residual) == MALAB_OK);
    CHECK(residual <= 1e-10);
    malab_grid* mu = nullptr;
    REQUIRE(malab_ma_operator(phi, &mu) == MALAB_OK);
    double* mv = nullptr;
    REQUIRE(malab_grid_values(mu, &mv) == MALAB_OK);
    CHECK(mv[17] == doctest::Approx(1.0));
    v[0] = -1.0;
    malab_grid* bad = nullptr;
    CHECK(malab_solve(f, 2.0, 1e-10, &bad, &residual) == MALAB_ERR_CONTRACT);
    malab_grid_destroy(mu);
    malab_grid_destroy(phi);
    malab_grid_destroy(f);
  }

  TEST_CASE("curvature coefficients") {
    const double origin[2] = {0.0, 0.0};
    double c[2] = {0.0, 0.0};
    int dim = 0;
    REQUIRE(malab_chern_coefficients(MALAB_METRIC_FS_P1, 1, origin, c, 2, &dim) == MALAB_OK);
    CHECK(dim == 1);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(c[1]) <= 1e-15);

    const double z[4] = {0.3, 0.2, -0.5, 0.1};
    std::vector<double> out(32);
    REQUIRE(malab_chern_coefficients(MALAB_METRIC_FS_P2, 0, z, out.data(), out.size(), &dim) == MALAB_OK);
    CHECK(dim == 2);
    CHECK(std::abs(out[0] - 0.850573572335685) <= 1e-12);
    CHECK(malab_chern_coefficients(MALAB_METRIC_FS_P2, 0, z, out.data(), 8, &dim) == MALAB_ERR_DIMENSION);
  }

  TEST_CASE("run configs and presets") {
    const fs::path out = fs::temp_directory_path() / "malab-capi-run";
    fs::remove_all(out);
    malab_report* r = nullptr;
    const char* yaml = "experiment: solve\nseed: 1\nresolution: 32\ndensity: {preset: constant}\n";
    REQUIRE(malab_run_config_text(yaml, out.string().c_str(), 1, 77, &r) == MALAB_OK);
    CHECK(malab_report_passed(r) == 1);
    CHECK(std::string(malab_report_text(r)).find("\nseed=77\n") != std::string::npos);
    CHECK(std::strlen(malab_report_hash(r)) == 64);
    CHECK(fs::exists(malab_report_path(r)));
    malab_report_destroy(r);

    r = nullptr;
    CHECK(malab_run_config_text("experiment: solve\n", out.string().c_str(), 0, 0, &r) == MALAB_ERR_CONFIG);
    CHECK(std::string(malab_last_error()).find("seed") != std::string::npos);

    REQUIRE(malab_presets(&r) == MALAB_OK);
    CHECK(std::string(malab_report_text(r)).find("fs-p2") != std::string::npos);
    malab_report_destroy(r);
    fs::remove_all(out);
  }
}
