// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "malab/regularity.hpp"

namespace malab {

/// Shortest text that round-trips the double ("{:.17g}").
std::string format_number(double v);

/// Deterministic key=value report with sections, tables and PASS/FAIL
/// verdicts. Holds no wall-clock data, so equal inputs give equal bytes.
class Report {
 public:
  explicit Report(std::string title);

  void section(const std::string& name);
  void add(const std::string& key, double v);
  void add(const std::string& key, int v);
  void add(const std::string& key, std::uint64_t v);
  void add(const std::string& key, bool v);
  void add(const std::string& key, const std::string& v);
  void add(const std::string& key, const char* v) { add(key, std::string(v)); }
  void add_list(const std::string& key, const std::vector<double>& v);
  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows);
  void verdict(const std::string& key, bool pass);

  bool passed() const { return failures_ == 0; }
  int verdict_count() const { return verdicts_; }
  std::string text() const;

 private:
  std::string title_;
  std::vector<std::string> lines_;
  int verdicts_ = 0;
  int failures_ = 0;
};

std::string decay_csv(const DecayTable& table, const std::string& scale_column = "eps");
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace malab
