// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "malab/report.hpp"

namespace malab {

struct CriterionResult {
  int id = 0;
  std::string title;
  double time_limit = 0.0;  // seconds
  double seconds = 0.0;     // wall time; never written to reports
  bool passed = false;      // numerical checks only
  std::string report_text;
  std::string error;

  bool within_time() const { return seconds < time_limit; }
};

struct VerifyOutcome {
  std::vector<CriterionResult> criteria;
  std::string report_text;
  std::filesystem::path report_path;
  bool passed = false;  // every criterion passed its checks and time limit
};

inline constexpr int kCriterionCount = 9;

/// Runs one built-in acceptance criterion (1..9); sub-experiment reports go
/// under out_dir.
CriterionResult run_criterion(int id, const std::filesystem::path& out_dir);

/// Runs criteria 1..9 and writes out_dir/verify.report.txt.
VerifyOutcome run_verify(const std::filesystem::path& out_dir, int workers);

}  // namespace malab
