// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "malab/config.hpp"

namespace malab {

std::string version_string();

struct RunOutcome {
  std::string name;
  std::string hash;
  std::string report_text;
  bool passed = false;
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> artifacts;
  std::string error;  // set when the experiment threw
};

/// Runs one experiment and writes its report and artifacts to out_dir.
/// Module errors are rethrown with the experiment name prefixed.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Runs independent experiments on up to `workers` threads. Errors are
/// captured per outcome instead of thrown.
std::vector<RunOutcome> run_experiments(const std::vector<ExperimentConfig>& configs,
                                        const std::filesystem::path& out_dir, int workers);

/// Calls job(i) for i in [0, count) on up to `workers` threads.
void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

/// Human-readable catalog of every preset and its parameters.
std::string presets_text();

/// --out flag, then the config's output.dir, then $MALAB_OUT, then "malab-out".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag,
                                         const std::optional<std::string>& config_dir = std::nullopt);

/// File-name stem "<name>-<first 16 hex digits of the config hash>".
std::string artifact_stem(const ExperimentConfig& config);

}  // namespace malab
