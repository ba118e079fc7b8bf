// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "malab/error.hpp"
#include "malab/regularity.hpp"
#include "malab/spectral.hpp"

namespace malab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Json mode(std::vector<int> k, double amplitude, double phase = 0.0) {
  return Json{{"k", k}, {"amplitude", amplitude}, {"phase", phase}};
}

// Placeholder defaults resolved against n in resolve_params.
const Json kDimDefault = "by-dimension";

std::vector<PresetInfo> make_catalog() {
  const ParamSpec p_param{"p", "number", 2.0, "integrability exponent, > 1"};
  const ParamSpec z0_param{"z0", "vector", kDimDefault, "centre, 2n real coordinates (default all 0.5)"};
  const ParamSpec delta_param{"delta_cells", "number", 4.0, "mollification width in grid steps"};
  return {
      {PresetFamily::Density, "constant", "f = 1", {p_param}},
      {PresetFamily::Density,
       "cosine-modes",
       "f = 1 + Σ a cos(2π k·x + phase)",
       {p_param, {"modes", "modes", kDimDefault, "list of {k, amplitude, phase}; k has 2n integer entries"}}},
      {PresetFamily::Density,
       "mollified-singular",
       "f ∝ (ρ² + δ²)^{-s}, ρ the periodic distance to z0",
       {p_param, {"s", "number", 0.4, "singularity strength; f is in L^p iff p·s < 1 as δ → 0"}, z0_param,
        delta_param}},
      {PresetFamily::Density,
       "manufactured",
       "f = det(I + H(ψ)) for the cosine-modes potential ψ",
       {p_param, {"modes", "modes", kDimDefault, "modes of ψ"}}},
      {PresetFamily::Function, "constant", "φ = value", {{"value", "number", -1.0, "constant value"}}},
      {PresetFamily::Function,
       "cosine-modes",
       "φ = Σ a cos(2π k·x + phase)",
       {{"modes", "modes", kDimDefault, "list of {k, amplitude, phase}"}}},
      {PresetFamily::Function,
       "mollified-singular",
       "ω-psh log-type potential: ¼Δφ = a(ρ_δ − 1) in each complex coordinate",
       {{"weight", "number", 0.5, "a in (0, 1]; I + H(φ) ≥ 1 − a"}, z0_param, delta_param}},
      {PresetFamily::Function,
       "holder-singular",
       "φ = A (ρ² + δ²)^α scaled so that min eig(I + H(φ)) equals min_eigenvalue",
       {{"alpha", "number", 0.3, "local Hölder exponent is 2α"}, z0_param, delta_param,
        {"min_eigenvalue", "number", 0.5, "target lower bound of I + H"}}},
      {PresetFamily::Metric, "flat", "Euclidean metric on C^n", {{"n", "integer", kDimDefault, "complex dimension (default: the experiment's n)"}}},
      {PresetFamily::Metric,
       "fs-p1",
       "Fubini-Study chart on P¹, g = (1 + |z|²)^{-2}",
       {{"derivatives", "string", "analytic", "analytic or finite-difference"},
        {"fd_step", "number", 1e-4, "finite-difference step"}}},
      {PresetFamily::Metric,
       "fs-p2",
       "Fubini-Study chart on P², g = ∂∂̄ log(1 + |z|²)",
       {{"derivatives", "string", "analytic", "analytic or finite-difference"},
        {"fd_step", "number", 1e-4, "finite-difference step"}}},
      {PresetFamily::Metric,
       "product",
       "block-diagonal product of factor metrics",
       {{"factors", "names", Json::array({"fs-p1", "fs-p1"}), "factor metric names (flat, fs-p1, fs-p2)"},
        {"derivatives", "string", "analytic", "analytic or finite-difference"},
        {"fd_step", "number", 1e-4, "finite-difference step"}}},
  };
}

Json dimension_default(const PresetInfo& info, const ParamSpec& spec, int n) {
  if (spec.name == "z0") return std::vector<double>(2 * n, 0.5);
  if (spec.name == "n") return n;
  // modes
  if (info.family == PresetFamily::Density && info.name == "cosine-modes") {
    std::vector<int> k(2 * n, 0);
    k[0] = 1;
    return Json::array({mode(k, 0.5)});
  }
  if (n == 1) return Json::array({mode({1, 0}, 0.05)});
  return Json::array({mode({1, 0, 0, 0}, 0.02), mode({0, 1, 0, 0}, 0.02), mode({0, 0, 1, 0}, 0.015),
                      mode({1, 0, 0, 1}, 0.01, -std::numbers::pi / 2)});
}

[[noreturn]] void param_error(const PresetInfo& info, const std::string& param, const std::string& msg) {
  fail(ErrorKind::Config, to_string(info.family) + " preset '" + info.name + "', parameter '" + param + "': " + msg);
}

Json check_type(const PresetInfo& info, const ParamSpec& spec, const Json& v, int n) {
  const int dims = 2 * n;
  if (spec.type == "number") {
    if (!v.is_number()) param_error(info, spec.name, "expected a number");
    return v.get<double>();
  }
  if (spec.type == "integer") {
    if (!v.is_number_integer()) param_error(info, spec.name, "expected an integer");
    return v;
  }
  if (spec.type == "string") {
    if (!v.is_string()) param_error(info, spec.name, "expected a string");
    return v;
  }
  if (spec.type == "vector") {
    if (!v.is_array() || static_cast<int>(v.size()) != dims)
      param_error(info, spec.name, "expected a list of " + std::to_string(dims) + " numbers");
    Json out = Json::array();
    for (const auto& x : v) {
      if (!x.is_number()) param_error(info, spec.name, "expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (spec.type == "names") {
    if (!v.is_array() || v.empty()) param_error(info, spec.name, "expected a nonempty list of names");
    for (const auto& x : v)
      if (!x.is_string()) param_error(info, spec.name, "expected names");
    return v;
  }
  // modes
  if (!v.is_array()) param_error(info, spec.name, "expected a list of modes");
  Json out = Json::array();
  for (const auto& m : v) {
    if (!m.is_object()) param_error(info, spec.name, "each mode must be a mapping");
    for (const auto& [key, _] : m.items())
      if (key != "k" && key != "amplitude" && key != "phase") param_error(info, spec.name, "unknown mode field '" + key + "'");
    if (!m.contains("k") || !m["k"].is_array() || static_cast<int>(m["k"].size()) != dims)
      param_error(info, spec.name, "mode k must have " + std::to_string(dims) + " integer entries");
    std::vector<int> k;
    for (const auto& x : m["k"]) {
      if (!x.is_number_integer()) param_error(info, spec.name, "mode k entries must be integers");
      k.push_back(x.get<int>());
    }
    if (!m.contains("amplitude") || !m["amplitude"].is_number()) param_error(info, spec.name, "mode needs a numeric amplitude");
    const double phase = m.contains("phase") ? (m["phase"].is_number() ? m["phase"].get<double>() : (param_error(info, spec.name, "phase must be a number"), 0.0)) : 0.0;
    out.push_back(mode(k, m["amplitude"].get<double>(), phase));
  }
  return out;
}

double number(const Json& params, const char* key) { return params.at(key).get<double>(); }

std::vector<double> centre(const Json& params) { return params.at("z0").get<std::vector<double>>(); }

GridFunction cosine_sum(const Json& modes, const TorusGrid& grid) {
  struct M {
    std::vector<int> k;
    double a, phase;
  };
  std::vector<M> ms;
  for (const auto& m : modes) ms.push_back({m["k"].get<std::vector<int>>(), m["amplitude"].get<double>(), m["phase"].get<double>()});
  const int dims = grid.real_dims();
  return GridFunction::sample(grid, [&](const TorusGrid::Point& x) {
    double s = 0.0;
    for (const auto& m : ms) {
      double arg = m.phase;
      for (int d = 0; d < dims; ++d) arg += kTwoPi * m.k[d] * x[d];
      s += m.a * std::cos(arg);
    }
    return s;
  });
}

MetricSpec apply_derivatives(MetricSpec spec, const Json& params) {
  const std::string mode = params.at("derivatives").get<std::string>();
  if (mode == "analytic") return spec;
  if (mode == "finite-difference") {
    const double h = number(params, "fd_step");
    if (!(h > 0.0)) fail(ErrorKind::Config, "fd_step must be positive");
    return spec.with_finite_differences(h);
  }
  fail(ErrorKind::Config, "derivatives must be 'analytic' or 'finite-difference', got '" + mode + "'");
}

MetricSpec metric_by_name(const std::string& name) {
  if (name == "fs-p1") return MetricSpec::fubini_study_p1();
  if (name == "fs-p2") return MetricSpec::fubini_study_p2();
  if (name == "flat") return MetricSpec::flat(1);
  fail(ErrorKind::Config, "unknown product factor '" + name + "'");
}

}  // namespace

std::string to_string(PresetFamily family) {
  switch (family) {
    case PresetFamily::Density: return "density";
    case PresetFamily::Function: return "function";
    case PresetFamily::Metric: return "metric";
  }
  return "unknown";
}

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = make_catalog();
  return catalog;
}

const PresetInfo& find_preset(PresetFamily family, const std::string& name) {
  for (const auto& p : preset_catalog())
    if (p.family == family && p.name == name) return p;
  fail(ErrorKind::Config, "unknown " + to_string(family) + " preset '" + name + "'");
}

Json resolve_params(PresetFamily family, const std::string& name, const Json& given, int n) {
  const PresetInfo& info = find_preset(family, name);
  if (!given.is_null() && !given.is_object()) fail(ErrorKind::Config, "preset parameters must be a mapping");
  if (given.is_object())
    for (const auto& [key, _] : given.items()) {
      const bool known = std::any_of(info.params.begin(), info.params.end(), [&](const ParamSpec& s) { return s.name == key; });
      if (!known) param_error(info, key, "unknown parameter");
    }
  Json out = Json::object();
  for (const ParamSpec& spec : info.params) {
    Json v = given.is_object() && given.contains(spec.name) ? given[spec.name] : spec.default_value;
    if (v == kDimDefault) v = dimension_default(info, spec, n);
    out[spec.name] = check_type(info, spec, v, n);
  }
  return out;
}

GridFunction holder_potential(double alpha, const TorusGrid& grid, const std::vector<double>& z0, double delta_cells,
                              double min_eigenvalue, double* amplitude) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0, 1)");
  if (!(min_eigenvalue > 0.0) || !(min_eigenvalue < 1.0)) fail(ErrorKind::Domain, "min_eigenvalue must lie in (0, 1)");
  if (!(delta_cells > 0.0)) fail(ErrorKind::Domain, "delta_cells must be positive");
  const int dims = grid.real_dims();
  const double delta = delta_cells * grid.spacing();
  GridFunction psi = GridFunction::sample(grid, [&](const TorusGrid::Point& x) {
    return std::pow(periodic_distance2(x, z0, dims) + delta * delta, alpha);
  });
  if (grid.n() == 2) psi = drop_nyquist_modes(psi);
  const double lowest = min_shifted_eigenvalue(complex_hessian(psi)) - 1.0;
  const double a = lowest < 0.0 ? (1.0 - min_eigenvalue) / -lowest : 1.0;
  psi *= a;
  if (amplitude != nullptr) *amplitude = a;
  return psi;
}

GridFunction log_potential(double weight, const TorusGrid& grid, const std::vector<double>& z0, double delta_cells) {
  if (!(weight > 0.0) || weight > 1.0) fail(ErrorKind::Domain, "weight must lie in (0, 1]");
  if (!(delta_cells > 0.0)) fail(ErrorKind::Domain, "delta_cells must be positive");
  const TorusGrid line(1, grid.resolution());
  const double delta = delta_cells * grid.spacing();
  std::vector<GridFunction> parts;
  for (int j = 0; j < grid.n(); ++j) {
    const std::vector<double> c{z0.size() > 2u * j ? z0[2 * j] : 0.5, z0.size() > 2u * j + 1 ? z0[2 * j + 1] : 0.5};
    GridFunction bump = GridFunction::sample(line, [&](const TorusGrid::Point& x) {
      return std::exp(-periodic_distance2(x, c, 2) / (2.0 * delta * delta));
    });
    bump *= 1.0 / bump.mean();
    bump += -1.0;
    GridFunction u = inverse_trace_hessian(bump);
    u *= weight;
    parts.push_back(std::move(u));
  }
  if (grid.n() == 1) return parts[0];
  const std::size_t N2 = line.size();
  GridFunction out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = parts[0][i / N2] + parts[1][i % N2];
  return out;
}

GridFunction manufactured_potential(const Json& params, const TorusGrid& grid) {
  GridFunction psi = cosine_sum(params.at("modes"), grid);
  if (grid.n() == 2) psi = drop_nyquist_modes(psi);
  return psi;
}

GridFunction build_function(const std::string& name, const Json& params, const TorusGrid& grid) {
  if (name == "constant") return GridFunction(grid, number(params, "value"));
  if (name == "cosine-modes") return cosine_sum(params.at("modes"), grid);
  if (name == "mollified-singular")
    return log_potential(number(params, "weight"), grid, centre(params), number(params, "delta_cells"));
  if (name == "holder-singular")
    return holder_potential(number(params, "alpha"), grid, centre(params), number(params, "delta_cells"),
                            number(params, "min_eigenvalue"));
  fail(ErrorKind::Config, "unknown function preset '" + name + "'");
}

Density build_density(const std::string& name, const Json& params, const TorusGrid& grid) {
  const double p = number(params, "p");
  if (name == "constant") return validate_density(GridFunction(grid, 1.0), p);
  if (name == "cosine-modes") {
    GridFunction f = cosine_sum(params.at("modes"), grid);
    f += 1.0;
    return validate_density(std::move(f), p);
  }
  if (name == "mollified-singular") {
    const double s = number(params, "s");
    if (!(s > 0.0)) fail(ErrorKind::Config, "mollified-singular density needs s > 0");
    const double delta = number(params, "delta_cells") * grid.spacing();
    const auto z0 = centre(params);
    const int dims = grid.real_dims();
    GridFunction f = GridFunction::sample(grid, [&](const TorusGrid::Point& x) {
      return std::pow(periodic_distance2(x, z0, dims) + delta * delta, -s);
    });
    f *= 1.0 / f.mean();
    return validate_density(std::move(f), p);
  }
  if (name == "manufactured") return validate_density(ma_operator(manufactured_potential(params, grid)), p);
  fail(ErrorKind::Config, "unknown density preset '" + name + "'");
}

MetricSpec build_metric(const std::string& name, const Json& params) {
  if (name == "flat") {
    const int n = params.at("n").get<int>();
    if (n < 1 || n > 4) fail(ErrorKind::Config, "flat metric dimension must be between 1 and 4");
    return MetricSpec::flat(n);
  }
  if (name == "fs-p1") return apply_derivatives(MetricSpec::fubini_study_p1(), params);
  if (name == "fs-p2") return apply_derivatives(MetricSpec::fubini_study_p2(), params);
  if (name == "product") {
    std::vector<MetricSpec> factors;
    for (const auto& f : params.at("factors")) factors.push_back(metric_by_name(f.get<std::string>()));
    return apply_derivatives(MetricSpec::product(std::move(factors)), params);
  }
  fail(ErrorKind::Config, "unknown metric preset '" + name + "'");
}

}  // namespace malab
