// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/report.hpp"

#include <fmt/format.h>

#include <fstream>

#include "malab/error.hpp"

namespace malab {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

Report::Report(std::string title) : title_(std::move(title)) {}

void Report::section(const std::string& name) { lines_.push_back("[" + name + "]"); }

void Report::add(const std::string& key, double v) { lines_.push_back(key + "=" + format_number(v)); }
void Report::add(const std::string& key, int v) { lines_.push_back(fmt::format("{}={}", key, v)); }
void Report::add(const std::string& key, std::uint64_t v) { lines_.push_back(fmt::format("{}={}", key, v)); }
void Report::add(const std::string& key, bool v) { lines_.push_back(key + (v ? "=true" : "=false")); }
void Report::add(const std::string& key, const std::string& v) { lines_.push_back(key + "=" + v); }

void Report::add_list(const std::string& key, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  add(key, s);
}

void Report::table(const std::string& name, const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows) {
  lines_.push_back("[table " + name + "]");
  lines_.push_back("columns=" + fmt::format("{}", fmt::join(columns, ",")));
  for (const auto& row : rows) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
    lines_.push_back(s);
  }
  lines_.push_back("[end]");
}

void Report::verdict(const std::string& key, bool pass) {
  ++verdicts_;
  if (!pass) ++failures_;
  lines_.push_back("verdict." + key + (pass ? "=PASS" : "=FAIL"));
}

std::string Report::text() const {
  std::string out = "# " + title_ + "\n";
  for (const auto& l : lines_) out += l + "\n";
  out += fmt::format("verdicts={}\nfailures={}\nstatus={}\n", verdicts_, failures_, passed() ? "PASS" : "FAIL");
  return out;
}

std::string decay_csv(const DecayTable& table, const std::string& scale_column) {
  std::string out = scale_column + ",l1,sup\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    out += format_number(table.scale[i]) + "," + format_number(table.l1[i]) + "," + format_number(table.sup[i]) + "\n";
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace malab
