// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "malab/malab.h"

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> reports_under(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < 11 || name.compare(name.size() - 11, 11, ".report.txt") != 0) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), root).generic_string()] = ss.str();
  }
  return out;
}

malab_verification* verify_into(const fs::path& dir) {
  fs::remove_all(dir);
  malab_verification* v = nullptr;
  if (malab_verify(dir.string().c_str(), 1, &v) != MALAB_OK) {
    std::fprintf(stderr, "verify failed: %s\n", malab_last_error());
    return nullptr;
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance-out");
  bool all = true;

  malab_verification* first = verify_into(root / "run1");
  if (first == nullptr) return 1;
  for (size_t i = 0; i < malab_verify_count(first); ++i) {
    int id = 0, passed = 0;
    const char* title = nullptr;
    const char* error = nullptr;
    double seconds = 0.0, limit = 0.0;
    malab_verify_criterion(first, i, &id, &title, &passed, &seconds, &limit, &error);
    const bool ok = passed != 0 && seconds < limit;
    all = all && ok;
    std::printf("criterion %d: %s %s (%.1fs / %.0fs)%s%s\n", id, ok ? "PASS" : "FAIL", title, seconds, limit,
                error != nullptr && *error != '\0' ? " error: " : "", error != nullptr ? error : "");
  }
  malab_verify_destroy(first);

  malab_verification* second = verify_into(root / "run2");
  if (second == nullptr) return 1;
  malab_verify_destroy(second);
  const auto a = reports_under(root / "run1");
  const auto b = reports_under(root / "run2");
  const bool same = !a.empty() && a == b;
  std::printf("criterion 10: %s verify reruns give byte-identical reports (%zu reports)\n", same ? "PASS" : "FAIL",
              a.size());
  if (!same)
    for (const auto& [name, text] : a) {
      const auto it = b.find(name);
      if (it == b.end() || it->second != text) std::printf("  differs: %s\n", name.c_str());
    }
  all = all && same;
  std::printf("%s\n", all ? "ALL PASS" : "SOME FAILED");
  return all ? 0 : 1;
}
