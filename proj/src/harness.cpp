// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <thread>

#include "malab/curvature.hpp"
#include "malab/error.hpp"
#include "malab/kernel.hpp"
#include "malab/regularity.hpp"
#include "malab/report.hpp"
#include "malab/rng.hpp"
#include "malab/smoothing.hpp"
#include "malab/spectral.hpp"

namespace malab {

namespace {

constexpr std::uint64_t kPointStream = 4;
constexpr std::uint64_t kProbeStream = 5;

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  std::string stem;
  Report& report;
  std::vector<std::filesystem::path>& artifacts;

  std::filesystem::path artifact(const std::string& suffix) const { return dir / (stem + "." + suffix); }

  void write_grid_artifact(const std::string& suffix, const GridFunction& f) const {
    if (!cfg.write_grids) return;
    const auto path = artifact(suffix);
    write_grid(f, path);
    artifacts.push_back(path);
    report.add("artifact." + suffix, path.filename().string());
  }

  void write_csv(const std::string& suffix, const std::string& text) const {
    const auto path = artifact(suffix);
    write_text_file(path, text);
    artifacts.push_back(path);
    report.add("artifact." + suffix, path.filename().string());
  }
};

std::vector<std::vector<double>> decay_rows(const DecayTable& t) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t.scale[i], t.l1[i], t.sup[i]});
  return rows;
}

void add_fit(Report& r, const std::string& prefix, const ExponentFit& fit, double min_r2) {
  r.add(prefix + ".alpha", fit.alpha);
  r.add(prefix + ".intercept", fit.intercept);
  r.add(prefix + ".r_squared", fit.r_squared);
  r.add(prefix + ".window_lo", fit.window_lo);
  r.add(prefix + ".rows_used", fit.rows_used);
  r.add(prefix + ".low_r_squared", fit.r_squared < min_r2);
  for (std::size_t i = 0; i < fit.warnings.size(); ++i) r.add(fmt::format("{}.warning{}", prefix, i), fit.warnings[i]);
}

void add_density(Report& r, const std::string& prefix, const Density& f) {
  r.add(prefix + ".p", f.p());
  r.add(prefix + ".q", f.q());
  r.add(prefix + ".lp_norm", f.lp_norm());
  r.add(prefix + ".min", f.report().min_value);
  r.add(prefix + ".mass_before", f.report().mass_before);
  r.add(prefix + ".rescaled", f.report().rescaled);
  r.add(prefix + ".rescale", f.report().rescale);
}

void add_solve(Report& r, const std::string& prefix, const SolveResult& s) {
  r.add(prefix + ".path", s.path);
  r.add(prefix + ".residual", s.residual);
  r.add(prefix + ".min_eigenvalue", s.min_eigenvalue);
  r.add(prefix + ".newton_iterations", s.newton_iterations);
  r.add(prefix + ".linear_iterations", s.linear_iterations);
  r.add_list(prefix + ".residual_history", s.residual_history);
  if (!s.ladder.empty()) {
    std::vector<std::vector<double>> rows;
    for (const auto& rung : s.ladder) rows.push_back({rung.delta, rung.residual, rung.sup_gap});
    r.table(prefix + ".regularization", {"delta", "residual", "sup_gap"}, rows);
    r.add(prefix + ".extrapolated_gap", s.extrapolated_gap);
  }
}

CVector chart_point(const std::vector<double>& reals) {
  CVector z(static_cast<Eigen::Index>(reals.size() / 2));
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = cplx(reals[2 * j], reals[2 * j + 1]);
  return z;
}

// ---------------------------------------------------------------------------

void run_solve(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const TorusGrid grid(cfg.n, cfg.resolution);
  const Density f = build_density(cfg.density->name, cfg.density->params, grid);
  r.section("density");
  add_density(r, "density", f);

  const SolveResult sol = solve_ma(f, cfg.solver);
  r.section("solution");
  add_solve(r, "solve", sol);
  double residual = sol.residual;
  if (sol.path != "regularized") residual = sup_distance(ma_operator(sol.phi), f.values());
  r.add("post_hoc_residual", residual);
  r.add("phi.max", sol.phi.max());
  r.add("phi.min", sol.phi.min());
  r.verdict("residual_contract", residual <= cfg.tolerances.residual);
  r.verdict("omega_psh", sol.min_eigenvalue >= -10.0 * cfg.tolerances.residual);
  r.verdict("sup_normalized", sol.phi.max() == 0.0);

  if (cfg.n == 1) {
    const SolveResult spectral = solve_n1(f);
    const double gap = sup_distance(spectral.phi, sol.phi);
    r.add("n1_agreement", gap);
    r.verdict("n1_agreement", gap <= 1e-8);
  }
  if (cfg.density->name == "manufactured") {
    const GridFunction psi = normalize_sup(manufactured_potential(cfg.density->params, grid));
    const double err = sup_distance(psi, sol.phi);
    r.add("manufactured_recovery", err);
    r.verdict("manufactured_recovery", err <= 1e-6);
  }
  ctx.write_grid_artifact("density.bin", f.values());
  ctx.write_grid_artifact("phi.bin", sol.phi);
}

void run_smooth(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const TorusGrid grid(cfg.n, cfg.resolution);
  const GridFunction phi = build_function(cfg.function->name, cfg.function->params, grid);
  const SmoothingKernel kernel = SmoothingKernel::make(cfg.kernel, cfg.n);
  r.section("kernel");
  r.add("kernel.kind", to_string(kernel.kind()));
  r.add("kernel.normalization", kernel.normalization());
  r.add("kernel.quadrature_total", kernel.quadrature_total());
  r.add("kernel.second_moment", kernel.second_moment());
  r.verdict("kernel_normalization", std::abs(kernel.quadrature_total() - 1.0) <= 1e-6);

  const double input_defect = quasi_psh_defect(phi);
  const bool psh_input = input_defect >= -cfg.tolerances.psh;
  r.section("input");
  r.add("input.psh_defect", input_defect);
  r.add("input.omega_psh", psh_input);

  const SmoothedFamily fam = monotone_family(phi, kernel, cfg.eps_ladder, cfg.constants.K);
  r.section("monotone_family");
  r.add("K", fam.K);
  r.add("K_prime", cfg.constants.K_prime);
  r.add("ordering_holds", fam.ordering_holds);
  r.add("worst_ordering_violation", fam.worst_ordering_violation);
  r.add("min_passing_K", fam.min_passing_K);
  double member_defect = std::numeric_limits<double>::infinity();
  for (const auto& m : fam.members) member_defect = std::min(member_defect, quasi_psh_defect(m));
  r.add("members.min_psh_defect", member_defect);
  if (psh_input) {
    r.verdict("ordering", fam.worst_ordering_violation <= cfg.tolerances.ordering);
    r.verdict("psh_preservation", member_defect >= -cfg.tolerances.psh);
  }

  const SmoothedFamily norm = normalized_family(fam, cfg.constants.C, cfg.constants.C1);
  r.section("normalized_family");
  r.add("C", norm.C);
  r.add("C1", norm.C1);
  r.add("shift", norm.shift);
  r.add("decreasing_to_base", norm.decreasing_to_base);
  std::vector<std::vector<double>> rows;
  bool bound_ok = true;
  double norm_defect = std::numeric_limits<double>::infinity();
  for (const auto& d : norm.diagnostics) {
    rows.push_back({d.eps, d.psh_defect, d.sup_to_base, d.l1_to_base, d.sup_lower_bound});
    bound_ok = bound_ok && d.sup_to_base >= d.sup_lower_bound - 1e-12;
    norm_defect = std::min(norm_defect, d.psh_defect);
  }
  r.table("normalized", {"eps", "psh_defect", "sup_to_base", "l1_to_base", "sup_lower_bound"}, rows);
  r.verdict("normalized_sup_bound", bound_ok);
  if (psh_input) r.verdict("normalized_omega_psh", norm_defect >= -cfg.tolerances.psh);

  DecayTable table;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    table.scale.push_back(fam.eps_ladder[i]);
    table.sup.push_back(sup_distance(fam.members[i], phi));
    table.l1.push_back(l1_distance(fam.members[i], phi));
  }
  table.provenance = {cfg.hash(), cfg.seed, cfg.resolution};
  r.section("decay");
  r.table("decay", {"eps", "l1", "sup"}, decay_rows(table));
  ctx.write_csv("decay.csv", decay_csv(table));
  const double floor = fit_floor(grid);
  std::size_t usable = 0;
  for (std::size_t i = 0; i < table.size(); ++i) usable += table.scale[i] >= floor && table.sup[i] > 0.0 ? 1 : 0;
  const bool has_rows = usable >= 4;
  if (has_rows) {
    const ExponentFit sup_fit = fit_exponent(table, FitColumn::Sup, floor);
    const ExponentFit l1_fit = fit_exponent(table, FitColumn::L1, floor);
    add_fit(r, "fit.sup", sup_fit, cfg.tolerances.min_r_squared);
    add_fit(r, "fit.l1", l1_fit, cfg.tolerances.min_r_squared);
    if (cfg.expect.sup_slope_target)
      r.verdict("sup_slope", std::abs(sup_fit.alpha - *cfg.expect.sup_slope_target) <= cfg.expect.sup_slope_tolerance);
    if (cfg.expect.l1_slope_min) r.verdict("l1_slope", l1_fit.alpha >= *cfg.expect.l1_slope_min);
  } else {
    r.add("fit.skipped", "fewer than 4 nonzero distances above the fit floor");
    if (cfg.expect.sup_slope_target) r.verdict("sup_slope", false);
    if (cfg.expect.l1_slope_min) r.verdict("l1_slope", false);
  }

  // Radiality of Φ(z, w) and agreement with the stencil path at grid points.
  r.section("radiality");
  const GridFunction smoothed = smooth(phi, kernel, cfg.probe_eps);
  double phase_spread = 0.0, agreement = 0.0;
  for (int k = 0; k < cfg.probes; ++k) {
    CounterRng rng(cfg.seed, kProbeStream, static_cast<std::uint64_t>(k));
    const std::size_t idx = static_cast<std::size_t>(rng.next() % grid.size());
    const TorusGrid::Point z = grid.coords(idx);
    const std::span<const double> zs(z.data(), grid.real_dims());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < 8; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / 8.0;
      const double v = phi_zw(phi, kernel, zs, std::polar(cfg.probe_eps, theta));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      agreement = std::max(agreement, std::abs(v - smoothed[idx]));
    }
    phase_spread = std::max(phase_spread, hi - lo);
  }
  r.add("probe_eps", cfg.probe_eps);
  r.add("phase_spread", phase_spread);
  r.add("stencil_agreement", agreement);
  r.verdict("radiality", phase_spread <= cfg.tolerances.radiality);
  r.verdict("stencil_agreement", agreement <= cfg.tolerances.radiality);
}

void run_curvature(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const MetricSpec spec = build_metric(cfg.metric->name, cfg.metric->params);
  const int n = spec.dim();
  const bool analytic = spec.derivative_mode() == DerivativeMode::Analytic;
  const double tol = analytic ? cfg.tolerances.identity : std::max(cfg.tolerances.identity, 10.0 * spec.fd_step() * spec.fd_step());
  double herm = 0.0, kahler = 0.0, largest = 0.0, imag = 0.0;
  for (int i = 0; i < cfg.points; ++i) {
    CounterRng rng(cfg.seed, kPointStream, static_cast<std::uint64_t>(i));
    CVector z(n);
    for (int j = 0; j < n; ++j) {
      const double re = 2.0 * rng.uniform() - 1.0;
      const double im = 2.0 * rng.uniform() - 1.0;
      z(j) = cplx(re, im);
    }
    const CurvatureTensor t = chern_coefficients(spec, z);
    herm = std::max(herm, check_hermitian_symmetry(t));
    kahler = std::max(kahler, check_kahler_identities(spec, z));
    for (const cplx c : t.coeffs()) largest = std::max(largest, std::abs(c));
    CVector tau(n), xi(n);
    for (int j = 0; j < n; ++j) {
      tau(j) = rng.complex_normal();
      xi(j) = rng.complex_normal();
    }
    imag = std::max(imag, std::abs(bisectional_form_complex(t, tau, xi).imag()));
  }
  r.section("curvature");
  r.add("metric", spec.name());
  r.add("derivatives", analytic ? "analytic" : "finite-difference");
  r.add("points", cfg.points);
  r.add("tolerance", tol);
  r.add("max_hermitian_violation", herm);
  r.add("max_kahler_violation", kahler);
  r.add("max_abs_coefficient", largest);
  r.add("max_form_imaginary_part", imag);
  r.verdict("hermitian_symmetry", herm <= tol);
  r.verdict("kahler_identities", kahler <= tol);
  r.verdict("form_real", imag <= (analytic ? 1e-10 : tol));
  if (spec.kind() == MetricSpec::Kind::Flat) r.verdict("flat_vanishes", largest <= cfg.tolerances.zero);
}

void run_lemma(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const MetricSpec spec = build_metric(cfg.metric->name, cfg.metric->params);
  const CVector z = chart_point(cfg.point);
  const LemmaResult lemma = verify_lemma_inequality(spec, z, cfg.w_ladder, cfg.samples, cfg.seed);
  const LemmaResult doubled = verify_lemma_inequality(spec, z, cfg.w_ladder, cfg.samples, cfg.seed, 2.0 * lemma.constant);
  const double orth = check_orthogonal_nonneg(spec, z, cfg.samples, cfg.seed);
  r.section("lemma");
  r.add("metric", spec.name());
  r.add_list("point", cfg.point);
  r.add_list("w_ladder", cfg.w_ladder);
  r.add("samples", cfg.samples);
  r.add("mu", lemma.mu);
  r.add("constant", lemma.constant);
  r.add("worst_margin", lemma.worst_margin);
  r.add("worst_w", lemma.worst_w);
  r.add("worst_margin_doubled_constant", doubled.worst_margin);
  r.add("orthogonal_min", orth);
  r.verdict("lemma_margin", lemma.worst_margin >= -cfg.tolerances.lemma);
  r.verdict("margin_monotone_in_C", doubled.worst_margin >= lemma.worst_margin);
  r.verdict("orthogonal_nonneg", orth >= -cfg.tolerances.lemma);
}

void run_holder(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const TorusGrid grid(cfg.n, cfg.resolution);
  GridFunction phi(grid);
  r.section("source");
  if (cfg.density) {
    const Density f = build_density(cfg.density->name, cfg.density->params, grid);
    add_density(r, "density", f);
    const SolveResult sol = cfg.n == 1 ? solve_n1(f) : solve_ma(f, cfg.solver);
    add_solve(r, "solve", sol);
    r.verdict("residual_contract", sol.residual <= cfg.tolerances.residual);
    phi = sol.phi;
    ctx.write_grid_artifact("density.bin", f.values());
  } else {
    phi = build_function(cfg.function->name, cfg.function->params, grid);
    r.add("function", cfg.function->name);
  }
  ctx.write_grid_artifact("phi.bin", phi);

  const SmoothingKernel kernel = SmoothingKernel::make(cfg.kernel, cfg.n);
  const Provenance prov{cfg.hash(), cfg.seed, cfg.resolution};
  const DecayTable decay = smoothing_decay_experiment(phi, kernel, cfg.eps_ladder, prov);
  const DecayTable modulus = modulus_of_continuity(phi, cfg.radii, prov);
  r.section("decay");
  r.table("decay", {"eps", "l1", "sup"}, decay_rows(decay));
  r.table("modulus", {"radius", "mean_oscillation", "max_oscillation"}, decay_rows(modulus));
  ctx.write_csv("decay.csv", decay_csv(decay));
  ctx.write_csv("modulus.csv", decay_csv(modulus, "radius"));

  const double floor = fit_floor(grid);
  const ExponentFit decay_fit = fit_exponent(decay, FitColumn::Sup, floor);
  const ExponentFit modulus_fit = fit_exponent(modulus, FitColumn::Sup, floor);
  r.section("fits");
  add_fit(r, "fit.smoothing", decay_fit, cfg.tolerances.min_r_squared);
  add_fit(r, "fit.modulus", modulus_fit, cfg.tolerances.min_r_squared);
  const HolderVerdict vd = holder_consistency_check(decay_fit, cfg.n, cfg.p, cfg.tolerances.holder_slack);
  const HolderVerdict vm = holder_consistency_check(modulus_fit, cfg.n, cfg.p, cfg.tolerances.holder_slack);
  r.add("threshold", vd.threshold);
  r.add("egz_exponent", vd.egz);
  r.add("upper_exponent", vd.upper);
  r.add("slack", vd.slack);
  r.add("smoothing.above_egz", vd.above_egz);
  r.add("smoothing.above_upper", vd.above_upper);
  r.add("modulus.above_egz", vm.above_egz);
  r.add("modulus.above_upper", vm.above_upper);
  r.verdict("smoothing_exponent", vd.pass);
  r.verdict("modulus_exponent", vm.pass);
  r.verdict("smoothing_r_squared", decay_fit.r_squared >= cfg.tolerances.min_r_squared);
  r.verdict("modulus_r_squared", modulus_fit.r_squared >= cfg.tolerances.min_r_squared);
}

void run_stability(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  Report& r = ctx.report;
  const TorusGrid grid(cfg.n, cfg.resolution);
  const Density f = build_density(cfg.density->name, cfg.density->params, grid);
  GridFunction h = build_function(cfg.perturbation->name, cfg.perturbation->params, grid);
  h += -h.mean();
  std::vector<std::pair<double, Density>> family;
  for (double t : cfg.amplitudes) {
    GridFunction g = f.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += t * h[i];
    family.emplace_back(t, validate_density(std::move(g), f.p()));
  }
  const StabilityReport rep = stability_experiment(f, family, cfg.solver, cfg.tolerances.holder_slack);
  r.section("stability");
  add_density(r, "density", f);
  std::vector<std::vector<double>> rows;
  for (const auto& row : rep.rows) rows.push_back({row.t, row.l1, row.sup, row.shift});
  r.table("stability", {"t", "l1", "sup", "shift"}, rows);
  add_fit(r, "fit", rep.fit, cfg.tolerances.min_r_squared);
  r.add("target", rep.target);
  r.add("slack", rep.slack);
  r.add("worst_residual", rep.worst_residual);
  r.verdict("residual_contract", rep.worst_residual <= cfg.tolerances.residual);
  r.verdict("stability_exponent", rep.pass);
  if (cfg.expect.stability_slope_target)
    r.verdict("stability_slope",
              std::abs(rep.fit.alpha - *cfg.expect.stability_slope_target) <= cfg.expect.stability_slope_tolerance);
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "experiment" : out;
}

}  // namespace

std::string version_string() { return MALAB_VERSION_STRING; }

std::string artifact_stem(const ExperimentConfig& config) {
  return sanitize(config.name) + "-" + config.hash().substr(0, 16);
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome out;
  out.name = config.name;
  out.hash = config.hash();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_dir.string() + ": " + ec.message());

  Report report("malab experiment report");
  report.add("version", version_string());
  report.add("experiment", to_string(config.kind));
  report.add("name", config.name);
  report.add("config_hash", out.hash);
  report.add("seed", config.seed);
  report.add("config", config.canonical().dump());
  const Context ctx{config, out_dir, artifact_stem(config), report, out.artifacts};
  try {
    switch (config.kind) {
      case ExperimentKind::Solve: run_solve(ctx); break;
      case ExperimentKind::Smooth: run_smooth(ctx); break;
      case ExperimentKind::Curvature: run_curvature(ctx); break;
      case ExperimentKind::Holder: run_holder(ctx); break;
      case ExperimentKind::Stability: run_stability(ctx); break;
      case ExperimentKind::Lemma: run_lemma(ctx); break;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "experiment '" + config.name + "' (" + to_string(config.kind) + "): " + e.what());
  }
  out.report_text = report.text();
  out.passed = report.passed();
  out.report_path = out_dir / (ctx.stem + ".report.txt");
  write_text_file(out.report_path, out.report_text);
  return out;
}

void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<RunOutcome> run_experiments(const std::vector<ExperimentConfig>& configs,
                                        const std::filesystem::path& out_dir, int workers) {
  std::vector<RunOutcome> outcomes(configs.size());
  run_jobs(configs.size(), workers, [&](std::size_t i) {
    try {
      outcomes[i] = run_experiment(configs[i], out_dir);
    } catch (const std::exception& e) {
      outcomes[i].name = configs[i].name;
      outcomes[i].passed = false;
      outcomes[i].error = e.what();
    }
  });
  return outcomes;
}

std::string presets_text() {
  std::string out;
  for (const PresetInfo& p : preset_catalog()) {
    out += fmt::format("{} {}: {}\n", to_string(p.family), p.name, p.summary);
    for (const ParamSpec& s : p.params)
      out += fmt::format("  {} ({}) default={}  {}\n", s.name, s.type, s.default_value.dump(), s.doc);
  }
  return out;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag,
                                         const std::optional<std::string>& config_dir) {
  if (flag && !flag->empty()) return *flag;
  if (config_dir && !config_dir->empty()) return *config_dir;
  if (const char* env = std::getenv("MALAB_OUT"); env != nullptr && *env != '\0') return env;
  return "malab-out";
}

}  // namespace malab
