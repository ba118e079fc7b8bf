// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "malab/config.hpp"
#include "malab/curvature.hpp"
#include "malab/error.hpp"
#include "malab/harness.hpp"
#include "malab/kernel.hpp"
#include "malab/ma_solver.hpp"
#include "malab/smoothing.hpp"

namespace malab {

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Spec {
  int id;
  const char* title;
  double limit;
};

constexpr Spec kSpecs[kCriterionCount] = {
    {1, "curvature identities", 10.0},
    {2, "lemma inequality", 60.0},
    {3, "orthogonal bisectional nonnegativity", 60.0},
    {4, "kernel and smoothing", 120.0},
    {5, "L1 decay of the smoothing", 120.0},
    {6, "solver correctness", 300.0},
    {7, "Holder consistency", 300.0},
    {8, "stability law", 600.0},
    {9, "monotone family", 600.0},
};

std::string lookup(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = key + "=";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return "missing";
}

// Runs a YAML experiment and copies its verdicts plus the listed keys.
bool sub_experiment(Report& r, const std::string& yaml, const std::filesystem::path& dir,
                    const std::vector<std::string>& keys) {
  const ExperimentConfig cfg = parse_config(yaml, "builtin");
  const RunOutcome out = run_experiment(cfg, dir);
  r.add(cfg.name + ".config_hash", out.hash);
  r.add(cfg.name + ".report", out.report_path.filename().string());
  for (const auto& k : keys) r.add(cfg.name + "." + k, lookup(out.report_text, k));
  std::istringstream in(out.report_text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("verdict.", 0) == 0) r.add(cfg.name + "." + line.substr(0, line.find('=')), line.substr(line.find('=') + 1));
  r.verdict(cfg.name, out.passed);
  return out.passed;
}

void criterion1(Report& r, const std::filesystem::path& dir) {
  const std::vector<std::string> keys{"max_hermitian_violation", "max_kahler_violation", "max_abs_coefficient"};
  const std::pair<const char*, const char*> metrics[] = {
      {"fs-p1", "fs-p1"},
      {"fs-p2", "fs-p2"},
      {"fs-p1xfs-p1", "{preset: product, factors: [fs-p1, fs-p1]}"},
      {"fs-p2xfs-p1", "{preset: product, factors: [fs-p2, fs-p1]}"},
      {"flat-n1", "{preset: flat, n: 1}"},
      {"flat-n2", "{preset: flat, n: 2}"},
  };
  for (const auto& [name, metric] : metrics)
    sub_experiment(r,
                   std::string("experiment: curvature\nname: c1-") + name + "\nseed: " + std::to_string(kSeed) +
                       "\npoints: 100\nmetric: " + metric + "\n",
                   dir, keys);
}

void criterion2(Report& r, const std::filesystem::path& dir) {
  for (const char* metric : {"fs-p1", "fs-p2"})
    sub_experiment(r,
                   std::string("experiment: lemma\nname: c2-") + metric + "\nseed: " + std::to_string(kSeed) +
                       "\nsamples: 100000\nw_ladder: [0.5, 0.1, 0.01]\nmetric: " + metric + "\n",
                   dir, {"mu", "constant", "worst_margin", "worst_margin_doubled_constant"});
}

void criterion3(Report& r, const std::filesystem::path&) {
  const std::vector<std::pair<std::string, MetricSpec>> metrics{
      {"fs-p1", MetricSpec::fubini_study_p1()},
      {"fs-p2", MetricSpec::fubini_study_p2()},
      {"fs-p1xfs-p1", MetricSpec::product({MetricSpec::fubini_study_p1(), MetricSpec::fubini_study_p1()})},
      {"fs-p2xfs-p1", MetricSpec::product({MetricSpec::fubini_study_p2(), MetricSpec::fubini_study_p1()})},
  };
  const double base[] = {0.3, 0.2, -0.5, 0.1, 0.25, -0.15};
  for (const auto& [name, spec] : metrics) {
    CVector z(spec.dim());
    for (int j = 0; j < spec.dim(); ++j) z(j) = cplx(base[2 * j], base[2 * j + 1]);
    const double worst = check_orthogonal_nonneg(spec, z, 100000, kSeed);
    r.add(name + ".orthogonal_min", worst);
    r.verdict(name + ".orthogonal_nonneg", worst >= -1e-8);
  }
}

void criterion4(Report& r, const std::filesystem::path& dir) {
  for (int n : {1, 2}) {
    const auto kernel = SmoothingKernel::make(KernelKind::Demailly, n);
    const std::string p = "n" + std::to_string(n);
    r.add(p + ".normalization_error", std::abs(kernel.quadrature_total() - 1.0));
    r.verdict(p + ".kernel_normalization", std::abs(kernel.quadrature_total() - 1.0) <= 1e-6);
    const TorusGrid grid(n, n == 1 ? 256 : 64);
    const GridFunction c(grid, -1.0);
    bool exact = true;
    for (double eps : {0.05, 0.15}) {
      const GridFunction s = smooth(c, kernel, eps);
      for (double v : s.values()) exact = exact && v == -1.0;
    }
    r.verdict(p + ".constant_fixed_point", exact);
  }
  sub_experiment(r,
                 "experiment: smooth\nname: c4-sine-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 256\nfunction: {preset: cosine-modes, modes: [{k: [1, 0], amplitude: 1.0, "
                     "phase: -1.5707963267948966}]}\neps_ladder: {lo: 0.032, hi: 0.1, count: 5}\nprobes: 8\n"
                     "expect: {sup_slope_target: 2.0, sup_slope_tolerance: 0.1}\n",
                 dir, {"fit.sup.alpha", "fit.sup.r_squared", "phase_spread", "stencil_agreement"});
  sub_experiment(r,
                 "experiment: smooth\nname: c4-psh-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 256\nfunction: cosine-modes\nprobes: 8\n",
                 dir, {"input.psh_defect", "members.min_psh_defect", "phase_spread"});
  sub_experiment(r,
                 "experiment: smooth\nname: c4-psh-n2\nseed: " + std::to_string(kSeed) +
                     "\nn: 2\nresolution: 64\nfunction: cosine-modes\neps_ladder: [0.05, 0.1]\nprobes: 2\n",
                 dir, {"input.psh_defect", "members.min_psh_defect", "phase_spread", "stencil_agreement"});
}

void criterion5(Report& r, const std::filesystem::path& dir) {
  sub_experiment(r,
                 "experiment: smooth\nname: c5-log-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 256\nfunction: mollified-singular\nexpect: {l1_slope_min: 1.8}\n",
                 dir, {"fit.l1.alpha", "fit.l1.r_squared", "fit.sup.alpha"});
}

void criterion6(Report& r, const std::filesystem::path& dir) {
  // Single-mode closed form: φ = −(a/π²) cos 2πx₁ − |a|/π².
  const double a = 0.5;
  const TorusGrid grid(1, 256);
  GridFunction f = GridFunction::sample(grid, [&](const TorusGrid::Point& x) {
    return 1.0 + a * std::cos(2.0 * std::numbers::pi * x[0]);
  });
  const Density d = validate_density(std::move(f), 2.0);
  const SolveResult sol = solve_n1(d);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const GridFunction exact = GridFunction::sample(grid, [&](const TorusGrid::Point& x) {
    return -(a / pi2) * std::cos(2.0 * std::numbers::pi * x[0]) - std::abs(a) / pi2;
  });
  const double err = sup_distance(sol.phi, exact);
  r.add("n1.closed_form_error", err);
  r.verdict("n1.closed_form", err <= 1e-10);
  r.add("n1.residual", sol.residual);
  r.verdict("n1.residual_contract", sol.residual <= 1e-10);
  sub_experiment(r,
                 "experiment: solve\nname: c6-manufactured-n2\nseed: " + std::to_string(kSeed) +
                     "\nn: 2\nresolution: 64\ndensity: manufactured\noutput: {write_grids: false}\n",
                 dir, {"manufactured_recovery", "post_hoc_residual", "solve.newton_iterations"});
  sub_experiment(r,
                 "experiment: solve\nname: c6-singular-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 256\ndensity: mollified-singular\n",
                 dir, {"n1_agreement", "post_hoc_residual"});
}

void criterion7(Report& r, const std::filesystem::path& dir) {
  sub_experiment(r,
                 "experiment: holder\nname: c7-singular-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 256\ndensity: {preset: mollified-singular, p: 2}\n",
                 dir,
                 {"fit.smoothing.alpha", "fit.smoothing.r_squared", "fit.modulus.alpha", "fit.modulus.r_squared",
                  "threshold"});
}

void criterion8(Report& r, const std::filesystem::path& dir) {
  sub_experiment(r,
                 "experiment: stability\nname: c8-linear-n1\nseed: " + std::to_string(kSeed) +
                     "\nn: 1\nresolution: 64\ndensity: constant\nperturbation: {preset: cosine-modes, modes: [{k: [1, 0], "
                     "amplitude: 1.0}]}\namplitudes: {lo: 0.01, hi: 0.16, count: 5}\n"
                     "expect: {stability_slope_target: 1.0, stability_slope_tolerance: 0.02}\n",
                 dir, {"fit.alpha", "fit.r_squared", "target"});
  sub_experiment(r,
                 "experiment: stability\nname: c8-family-n2\nseed: " + std::to_string(kSeed) +
                     "\nn: 2\nresolution: 32\ndensity: manufactured\nperturbation: {preset: cosine-modes, modes: "
                     "[{k: [1, 0, 0, 0], amplitude: 1.0}, {k: [0, 0, 1, 1], amplitude: 0.5}]}\n"
                     "amplitudes: {lo: 0.01, hi: 0.16, count: 5}\n",
                 dir, {"fit.alpha", "fit.r_squared", "target"});
}

void criterion9(Report& r, const std::filesystem::path& dir) {
  for (int n : {1, 2})
    for (const char* preset : {"constant", "cosine-modes", "mollified-singular", "holder-singular"}) {
      const std::string name = "c9-" + std::string(preset) + "-n" + std::to_string(n);
      sub_experiment(r,
                     "experiment: smooth\nname: " + name + "\nseed: " + std::to_string(kSeed) + "\nn: " + std::to_string(n) +
                         "\nresolution: " + (n == 1 ? "256" : "32") + "\nfunction: " + preset + "\nprobes: 1\n",
                     dir, {"input.omega_psh", "worst_ordering_violation", "min_passing_K"});
    }
}

}  // namespace

CriterionResult run_criterion(int id, const std::filesystem::path& out_dir) {
  if (id < 1 || id > kCriterionCount) fail(ErrorKind::Domain, "criterion id must be in 1..9");
  const Spec& spec = kSpecs[id - 1];
  CriterionResult res;
  res.id = id;
  res.title = spec.title;
  res.time_limit = spec.limit;
  Report r("criterion " + std::to_string(id) + ": " + spec.title);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: criterion1(r, out_dir); break;
      case 2: criterion2(r, out_dir); break;
      case 3: criterion3(r, out_dir); break;
      case 4: criterion4(r, out_dir); break;
      case 5: criterion5(r, out_dir); break;
      case 6: criterion6(r, out_dir); break;
      case 7: criterion7(r, out_dir); break;
      case 8: criterion8(r, out_dir); break;
      case 9: criterion9(r, out_dir); break;
    }
  } catch (const std::exception& e) {
    res.error = e.what();
    r.add("error", res.error);
    r.verdict("completed", false);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.passed = r.passed() && res.error.empty();
  res.report_text = r.text();
  return res;
}

VerifyOutcome run_verify(const std::filesystem::path& out_dir, int workers) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_dir.string());
  VerifyOutcome out;
  out.criteria.resize(kCriterionCount);
  run_jobs(kCriterionCount, workers, [&](std::size_t i) { out.criteria[i] = run_criterion(static_cast<int>(i) + 1, out_dir); });
  out.report_text = "# malab verify report\nversion=" + version_string() + "\n";
  out.passed = true;
  for (const auto& c : out.criteria) {
    out.report_text += c.report_text;
    out.passed = out.passed && c.passed && c.within_time();
  }
  out.report_path = out_dir / "verify.report.txt";
  write_text_file(out.report_path, out.report_text);
  return out;
}

}  // namespace malab
