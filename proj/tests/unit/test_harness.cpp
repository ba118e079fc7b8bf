// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "malab/config.hpp"
#include "malab/error.hpp"
#include "malab/harness.hpp"
#include "malab/report.hpp"

using namespace malab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("malab-harness-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("report formatting") {
    Report r("title");
    r.section("s");
    r.add("x", 0.1);
    r.add("k", 3);
    r.add("flag", true);
    r.add_list("v", {1.0, 2.5});
    r.table("t", {"a", "b"}, {{1.0, 2.0}});
    r.verdict("good", true);
    CHECK(r.passed());
    r.verdict("bad", false);
    CHECK(!r.passed());
    CHECK(r.verdict_count() == 2);
    const std::string t = r.text();
    CHECK(t.rfind("# title\n[s]\n", 0) == 0);
    CHECK(has_line(t, "x=0.10000000000000001"));
    CHECK(has_line(t, "k=3"));
    CHECK(has_line(t, "flag=true"));
    CHECK(has_line(t, "v=1,2.5"));
    CHECK(has_line(t, "columns=a,b"));
    CHECK(has_line(t, "1,2"));
    CHECK(has_line(t, "verdict.bad=FAIL"));
    CHECK(has_line(t, "status=FAIL"));
    CHECK(format_number(0.1) == "0.10000000000000001");
  }

  TEST_CASE("constant density gives a flat solution") {
    const fs::path out = scratch("const");
    const ExperimentConfig c = parse_config("experiment: solve\nseed: 1\nresolution: 32\ndensity: {preset: constant}\n");
    const RunOutcome r = run_experiment(c, out);
    CHECK(r.passed);
    CHECK(has_line(r.report_text, "post_hoc_residual=0"));
    CHECK(has_line(r.report_text, "phi.max=0"));
    CHECK(has_line(r.report_text, "phi.min=0"));
    CHECK(fs::exists(r.report_path));
    CHECK(slurp(r.report_path) == r.report_text);
    for (const auto& a : r.artifacts) CHECK(fs::exists(a));
    fs::remove_all(out);
  }

  TEST_CASE("reports are reproducible and carry provenance") {
    const fs::path a = scratch("rep-a");
    const fs::path b = scratch("rep-b");
    const ExperimentConfig c = parse_config("experiment: lemma\nseed: 42\nmetric: {preset: fs-p2}\nsamples: 100000\n");
    const RunOutcome ra = run_experiment(c, a);
    const RunOutcome rb = run_experiment(c, b);
    CHECK(ra.passed);
    CHECK(ra.report_text == rb.report_text);
    CHECK(has_line(ra.report_text, "config_hash=" + c.hash()));
    CHECK(has_line(ra.report_text, "seed=42"));
    CHECK(has_line(ra.report_text, "version=" + version_string()));
    CHECK(ra.report_path.filename() == rb.report_path.filename());
    CHECK(ra.report_path.filename().string().find(c.hash().substr(0, 16)) != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("Holder experiment in one dimension") {
    const fs::path out = scratch("holder");
    const ExperimentConfig c =
        parse_config("experiment: holder\nseed: 2\nresolution: 256\ndensity: {preset: mollified-singular, p: 2}\n");
    const RunOutcome r = run_experiment(c, out);
    CHECK(r.passed);
    CHECK(r.report_text.find("verdict.") != std::string::npos);
    fs::remove_all(out);
  }

  TEST_CASE("errors name the experiment") {
    const fs::path out = scratch("err");
    const ExperimentConfig c =
        parse_config("experiment: smooth\nname: coarse\nseed: 1\nresolution: 16\nfunction: {preset: constant}\n"
                     "eps_ladder: [0.01, 0.02, 0.03, 0.04]\n");
    try {
      run_experiment(c, out);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("experiment 'coarse' (smooth)") != std::string::npos);
    }
    const auto outcomes = run_experiments({c}, out, 2);
    REQUIRE(outcomes.size() == 1);
    CHECK(!outcomes[0].passed);
    CHECK(outcomes[0].error.find("coarse") != std::string::npos);
    fs::remove_all(out);
  }

  TEST_CASE("worker pool visits every job once") {
    std::vector<int> hits(37, 0);
    run_jobs(hits.size(), 3, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
  }

  TEST_CASE("output directory precedence") {
    ::unsetenv("MALAB_OUT");
    CHECK(resolve_output_dir(std::nullopt) == fs::path("malab-out"));
    ::setenv("MALAB_OUT", "from-env", 1);
    CHECK(resolve_output_dir(std::nullopt) == fs::path("from-env"));
    CHECK(resolve_output_dir(std::nullopt, std::string("from-config")) == fs::path("from-config"));
    CHECK(resolve_output_dir(std::string("from-flag"), std::string("from-config")) == fs::path("from-flag"));
    ::unsetenv("MALAB_OUT");
  }

  TEST_CASE("preset listing") {
    const std::string t = presets_text();
    CHECK(t.find("density mollified-singular") != std::string::npos);
    CHECK(t.find("metric fs-p2") != std::string::npos);
  }
}
