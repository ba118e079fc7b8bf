// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "malab/kernel.hpp"
#include "malab/ma_solver.hpp"
#include "malab/presets.hpp"

namespace malab {

enum class ExperimentKind { Solve, Smooth, Curvature, Holder, Stability, Lemma };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct PresetRef {
  std::string name;
  Json params;  // resolved, defaults filled
};

struct Tolerances {
  double residual = 1e-10;
  double identity = 1e-8;
  double zero = 1e-12;
  double lemma = 1e-8;
  double psh = 1e-6;
  double radiality = 1e-8;
  double ordering = 1e-9;
  double holder_slack = 0.05;
  double min_r_squared = 0.95;
};

struct Constants {
  double K = 10.0;
  double C = 1.0;
  double C1 = 1.0;
  double K_prime = 0.0;
};

// Optional verdicts on fitted slopes.
struct Expectations {
  std::optional<double> l1_slope_min;
  std::optional<double> sup_slope_target;
  double sup_slope_tolerance = 0.1;
  std::optional<double> stability_slope_target;
  double stability_slope_tolerance = 0.02;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Solve;
  std::string name;
  std::uint64_t seed = 0;
  int n = 1;
  int resolution = 64;
  double p = 2.0;  // integrability exponent for Hölder thresholds

  std::optional<PresetRef> metric;
  std::optional<PresetRef> density;
  std::optional<PresetRef> function;
  std::optional<PresetRef> perturbation;

  KernelKind kernel = KernelKind::Demailly;
  std::vector<double> eps_ladder;
  std::vector<double> radii;
  std::vector<double> w_ladder;
  std::vector<double> amplitudes;
  std::vector<double> point;  // chart point, 2·dim real coordinates
  std::uint64_t samples = 100000;
  int points = 100;
  int probes = 8;
  double probe_eps = 0.05;

  Tolerances tolerances;
  Constants constants;
  Expectations expect;
  SolverOptions solver;
  bool write_grids = true;
  std::optional<std::string> output_dir;  // not part of the canonical form

  /// Fully resolved configuration with every default spelled out.
  Json canonical() const;
  /// SHA-256 of canonical().dump(), lowercase hex.
  std::string hash() const;
};

/// Parses YAML text. Errors carry "source:line:column: field: message".
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);

}  // namespace malab
