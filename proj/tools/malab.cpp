// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "malab/malab.h"

namespace {

struct JobResult {
  std::string text;
  std::string path;
  std::string error;
  bool passed = false;
};

JobResult run_one(const std::string& config, const char* out, std::optional<std::uint64_t> seed) {
  JobResult r;
  malab_report* report = nullptr;
  const malab_status st = malab_run_config(config.c_str(), out, seed.has_value() ? 1 : 0, seed.value_or(0), &report);
  if (st != MALAB_OK) {
    r.error = std::string(malab_status_name(st)) + ": " + malab_last_error();
    return r;
  }
  r.text = malab_report_text(report);
  r.path = malab_report_path(report);
  r.passed = malab_report_passed(report) != 0;
  malab_report_destroy(report);
  return r;
}

int cmd_run(const std::vector<std::string>& configs, const std::optional<std::string>& out, int workers,
            std::optional<std::uint64_t> seed) {
  std::vector<JobResult> results(configs.size());
  const char* out_c = out ? out->c_str() : nullptr;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) results[i] = run_one(configs[i], out_c, seed);
  };
  const int count = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(configs.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const JobResult& r = results[i];
    if (!r.error.empty()) {
      std::fprintf(stderr, "malab: %s: %s\n", configs[i].c_str(), r.error.c_str());
      status = 1;
      continue;
    }
    std::fputs(r.text.c_str(), stdout);
    std::fprintf(stderr, "malab: %s -> %s [%s]\n", configs[i].c_str(), r.path.c_str(), r.passed ? "PASS" : "FAIL");
    if (!r.passed) status = 1;
  }
  return status;
}

int cmd_presets() {
  malab_report* report = nullptr;
  const malab_status st = malab_presets(&report);
  if (st != MALAB_OK) {
    std::fprintf(stderr, "malab: %s\n", malab_last_error());
    return 1;
  }
  std::fputs(malab_report_text(report), stdout);
  malab_report_destroy(report);
  return 0;
}

int cmd_verify(const std::optional<std::string>& out, int workers) {
  malab_verification* v = nullptr;
  const malab_status st = malab_verify(out ? out->c_str() : nullptr, workers, &v);
  if (st != MALAB_OK) {
    std::fprintf(stderr, "malab: %s: %s\n", malab_status_name(st), malab_last_error());
    return 1;
  }
  for (std::size_t i = 0; i < malab_verify_count(v); ++i) {
    int id = 0, passed = 0;
    const char* title = nullptr;
    const char* error = nullptr;
    double seconds = 0, limit = 0;
    malab_verify_criterion(v, i, &id, &title, &passed, &seconds, &limit, &error);
    std::fprintf(stderr, "criterion %d %s: %s (%.1fs, limit %.0fs)%s%s\n", id, title, passed ? "PASS" : "FAIL",
                 seconds, limit, *error ? " " : "", error);
  }
  std::fputs(malab_verify_text(v), stdout);
  std::fprintf(stderr, "malab: report written to %s\n", malab_verify_path(v));
  const int status = malab_verify_passed(v) ? 0 : 1;
  malab_verify_destroy(v);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for the complex Monge-Ampere equation on flat tori"};
  app.set_version_flag("--version", std::string(malab_version()));
  app.require_subcommand(1);

  std::optional<std::string> out;
  int workers = 1;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run experiment configs");
  std::vector<std::string> configs;
  run->add_option("config", configs, "Experiment config files (YAML)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: $MALAB_OUT or ./malab-out)");
  run->add_option("--workers", workers, "Concurrent experiment jobs")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the seed of every config");

  app.add_subcommand("presets", "List presets and their parameters");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--out", out, "Output directory (default: $MALAB_OUT or ./malab-out)");
  verify->add_option("--workers", workers, "Concurrent criterion jobs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(configs, out, workers, seed);
  if (verify->parsed()) return cmd_verify(out, workers);
  return cmd_presets();
}
