// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "malab/error.hpp"
#include "malab/regularity.hpp"
#include "malab/smoothing.hpp"

namespace malab {

namespace {

struct ExperimentName {
  ExperimentKind kind;
  const char* name;
};

constexpr ExperimentName kExperimentNames[] = {
    {ExperimentKind::Solve, "solve"},   {ExperimentKind::Smooth, "smooth"},       {ExperimentKind::Curvature, "curvature"},
    {ExperimentKind::Holder, "holder"}, {ExperimentKind::Stability, "stability"}, {ExperimentKind::Lemma, "lemma"},
};

class Reader {
 public:
  Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void error(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::string where = source_;
    if (node.IsDefined() && node.Mark().line >= 0)
      where += ":" + std::to_string(node.Mark().line + 1) + ":" + std::to_string(node.Mark().column + 1);
    fail(ErrorKind::Config, where + ": " + field + ": " + msg);
  }

  void expect_map(const YAML::Node& node, const std::string& field, const std::set<std::string>& allowed) const {
    if (!node.IsMap()) error(node, field, "expected a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) error(kv.first, field.empty() ? key : field + "." + key, "unknown field");
    }
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) error(node, field, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      error(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) error(node, field, "expected an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::Exception&) {
      error(node, field, "expected an integer, got '" + node.Scalar() + "'");
    }
  }

  std::uint64_t unsigned_integer(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar() || node.Scalar().empty() || node.Scalar()[0] == '-') error(node, field, "expected a nonnegative integer");
    try {
      return node.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      error(node, field, "expected a nonnegative integer, got '" + node.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) error(node, field, "expected true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      error(node, field, "expected true or false, got '" + node.Scalar() + "'");
    }
  }

  std::string string(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) error(node, field, "expected a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) error(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  Json to_json(const YAML::Node& node, const std::string& field) const {
    switch (node.Type()) {
      case YAML::NodeType::Null: return nullptr;
      case YAML::NodeType::Sequence: {
        Json arr = Json::array();
        for (std::size_t i = 0; i < node.size(); ++i) arr.push_back(to_json(node[i], field + "[" + std::to_string(i) + "]"));
        return arr;
      }
      case YAML::NodeType::Map: {
        Json obj = Json::object();
        for (const auto& kv : node) obj[kv.first.as<std::string>()] = to_json(kv.second, field + "." + kv.first.as<std::string>());
        return obj;
      }
      case YAML::NodeType::Scalar: {
        const std::string& s = node.Scalar();
        if (node.Tag() != "!") {
          long long i = 0;
          if (YAML::convert<long long>::decode(node, i)) return i;
          double d = 0.0;
          if (YAML::convert<double>::decode(node, d)) return d;
          bool b = false;
          if (YAML::convert<bool>::decode(node, b)) return b;
        }
        return s;
      }
      default: error(node, field, "unsupported value");
    }
  }

  PresetRef preset(const YAML::Node& node, const std::string& field, PresetFamily family, int n) const {
    PresetRef ref;
    Json params = Json::object();
    if (node.IsScalar()) {
      ref.name = node.Scalar();
    } else if (node.IsMap()) {
      if (!node["preset"]) error(node, field, "missing 'preset'");
      ref.name = string(node["preset"], field + ".preset");
      for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (key != "preset") params[key] = to_json(kv.second, field + "." + key);
      }
    } else {
      error(node, field, "expected a preset name or a mapping with 'preset'");
    }
    try {
      ref.params = resolve_params(family, ref.name, params, n);
    } catch (const Error& e) {
      error(node, field, e.what());
    }
    return ref;
  }

  std::vector<double> ladder(const YAML::Node& node, const std::string& field) const {
    if (node.IsSequence()) return numbers(node, field);
    expect_map(node, field, {"lo", "hi", "count"});
    for (const char* k : {"lo", "hi", "count"})
      if (!node[k]) error(node, field, std::string("missing '") + k + "'");
    try {
      return geometric_ladder(number(node["lo"], field + ".lo"), number(node["hi"], field + ".hi"),
                              static_cast<int>(integer(node["count"], field + ".count")));
    } catch (const Error& e) {
      error(node, field, e.what());
    }
  }

 private:
  std::string source_;
};

void check_increasing(const Reader& r, const YAML::Node& node, const std::string& field, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) r.error(node, field, "entries must be positive");
    if (i > 0 && !(v[i] > v[i - 1])) r.error(node, field, "entries must be strictly increasing");
  }
}

Json preset_json(const std::optional<PresetRef>& ref) {
  if (!ref) return nullptr;
  return Json{{"preset", ref->name}, {"params", ref->params}};
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& e : kExperimentNames)
    if (e.kind == kind) return e.name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& e : kExperimentNames)
    if (name == e.name) return e.kind;
  fail(ErrorKind::Config, "unknown experiment kind '" + name + "' (expected solve, smooth, curvature, holder, stability or lemma)");
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::Io, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Json ExperimentConfig::canonical() const {
  Json j;
  j["experiment"] = to_string(kind);
  j["name"] = name;
  j["seed"] = seed;
  j["n"] = n;
  j["resolution"] = resolution;
  j["p"] = p;
  j["metric"] = preset_json(metric);
  j["density"] = preset_json(density);
  j["function"] = preset_json(function);
  j["perturbation"] = preset_json(perturbation);
  j["kernel"] = to_string(kernel);
  j["eps_ladder"] = eps_ladder;
  j["radii"] = radii;
  j["w_ladder"] = w_ladder;
  j["amplitudes"] = amplitudes;
  j["point"] = point;
  j["samples"] = samples;
  j["points"] = points;
  j["probes"] = probes;
  j["probe_eps"] = probe_eps;
  j["tolerances"] = {{"residual", tolerances.residual},   {"identity", tolerances.identity},
                     {"zero", tolerances.zero},           {"lemma", tolerances.lemma},
                     {"psh", tolerances.psh},             {"radiality", tolerances.radiality},
                     {"ordering", tolerances.ordering},   {"holder_slack", tolerances.holder_slack},
                     {"min_r_squared", tolerances.min_r_squared}};
  j["constants"] = {{"K", constants.K}, {"C", constants.C}, {"C1", constants.C1}, {"K_prime", constants.K_prime}};
  Json e = Json::object();
  if (expect.l1_slope_min) e["l1_slope_min"] = *expect.l1_slope_min;
  if (expect.sup_slope_target) {
    e["sup_slope_target"] = *expect.sup_slope_target;
    e["sup_slope_tolerance"] = expect.sup_slope_tolerance;
  }
  if (expect.stability_slope_target) {
    e["stability_slope_target"] = *expect.stability_slope_target;
    e["stability_slope_tolerance"] = expect.stability_slope_tolerance;
  }
  j["expect"] = e;
  j["solver"] = {{"max_iterations", solver.max_iterations},
                 {"residual_tolerance", solver.residual_tolerance},
                 {"damping_factor", solver.damping_factor},
                 {"max_backtracks", solver.max_backtracks},
                 {"max_linear_iterations", solver.max_linear_iterations},
                 {"positivity_floor", solver.positivity_floor},
                 {"regularization_ladder", solver.regularization_ladder}};
  j["write_grids"] = write_grids;
  return j;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical().dump()); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorKind::Config, source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                                ": syntax error: " + e.msg);
  }
  r.expect_map(root, "", {"experiment", "name", "seed", "n", "resolution", "metric", "density", "function",
                          "perturbation", "kernel", "eps_ladder", "radii", "w_ladder", "amplitudes", "point",
                          "samples", "points", "probes", "probe_eps", "p", "tolerances", "constants", "expect", "solver",
                          "output"});
  ExperimentConfig c;
  if (!root["experiment"]) r.error(root, "experiment", "required field is missing");
  try {
    c.kind = parse_experiment_kind(r.string(root["experiment"], "experiment"));
  } catch (const Error& e) {
    r.error(root["experiment"], "experiment", e.what());
  }
  c.name = root["name"] ? r.string(root["name"], "name") : to_string(c.kind);
  if (!root["seed"]) r.error(root, "seed", "required field is missing (seeds must be explicit)");
  c.seed = r.unsigned_integer(root["seed"], "seed");
  if (root["n"]) {
    const long long n = r.integer(root["n"], "n");
    if (n != 1 && n != 2) r.error(root["n"], "n", "complex dimension must be 1 or 2");
    c.n = static_cast<int>(n);
  }
  if (root["resolution"]) {
    const long long res = r.integer(root["resolution"], "resolution");
    if (res < 4 || res > 4096 || (res & (res - 1)) != 0)
      r.error(root["resolution"], "resolution", "must be a power of two between 4 and 4096");
    c.resolution = static_cast<int>(res);
  }
  const TorusGrid grid(c.n, c.resolution);

  if (root["metric"]) c.metric = r.preset(root["metric"], "metric", PresetFamily::Metric, c.n);
  if (root["density"]) c.density = r.preset(root["density"], "density", PresetFamily::Density, c.n);
  if (root["function"]) c.function = r.preset(root["function"], "function", PresetFamily::Function, c.n);
  if (root["perturbation"]) c.perturbation = r.preset(root["perturbation"], "perturbation", PresetFamily::Function, c.n);

  if (c.density) c.p = c.density->params.at("p").get<double>();
  if (root["p"]) {
    if (c.density) r.error(root["p"], "p", "set p inside the density preset");
    c.p = r.number(root["p"], "p");
  }
  if (!(c.p > 1.0)) r.error(root["p"], "p", "must exceed 1");

  if (root["kernel"]) {
    try {
      c.kernel = parse_kernel_kind(r.string(root["kernel"], "kernel"));
    } catch (const Error& e) {
      r.error(root["kernel"], "kernel", e.what());
    }
  }

  c.eps_ladder = root["eps_ladder"] ? r.ladder(root["eps_ladder"], "eps_ladder") : default_ladder(grid);
  check_increasing(r, root["eps_ladder"], "eps_ladder", c.eps_ladder);
  c.radii = snap_radii(grid, root["radii"] ? r.ladder(root["radii"], "radii") : default_ladder(grid));
  c.w_ladder = root["w_ladder"] ? r.numbers(root["w_ladder"], "w_ladder") : std::vector<double>{0.5, 0.1, 0.01};
  for (double w : c.w_ladder)
    if (!(w > 0.0)) r.error(root["w_ladder"], "w_ladder", "every |w| must be positive");
  c.amplitudes = root["amplitudes"] ? r.ladder(root["amplitudes"], "amplitudes") : geometric_ladder(0.01, 0.16, 5);
  check_increasing(r, root["amplitudes"], "amplitudes", c.amplitudes);

  const int metric_dim = c.metric ? build_metric(c.metric->name, c.metric->params).dim() : c.n;
  if (root["point"]) {
    c.point = r.numbers(root["point"], "point");
    if (static_cast<int>(c.point.size()) != 2 * metric_dim)
      r.error(root["point"], "point", "expected " + std::to_string(2 * metric_dim) + " real coordinates");
  } else {
    const double base[] = {0.3, 0.2, -0.5, 0.1, 0.25, -0.15, 0.4, 0.05};
    c.point.assign(base, base + std::min(8, 2 * metric_dim));
    c.point.resize(2 * metric_dim, 0.0);
  }
  if (root["samples"]) c.samples = r.unsigned_integer(root["samples"], "samples");
  if (c.samples < 1) r.error(root["samples"], "samples", "must be at least 1");
  if (root["points"]) c.points = static_cast<int>(r.integer(root["points"], "points"));
  if (c.points < 1) r.error(root["points"], "points", "must be at least 1");
  if (root["probes"]) c.probes = static_cast<int>(r.integer(root["probes"], "probes"));
  if (c.probes < 1) r.error(root["probes"], "probes", "must be at least 1");
  c.probe_eps = root["probe_eps"] ? r.number(root["probe_eps"], "probe_eps") : std::min(0.2, std::max(0.05, 4.0 * grid.spacing()));
  if (!(c.probe_eps > 0.0) || c.probe_eps >= 0.25) r.error(root["probe_eps"], "probe_eps", "must lie in (0, 1/4)");

  if (const auto t = root["tolerances"]) {
    r.expect_map(t, "tolerances", {"residual", "identity", "zero", "lemma", "psh", "radiality", "ordering",
                                   "holder_slack", "min_r_squared"});
    auto set = [&](const char* key, double& dst) {
      if (t[key]) {
        dst = r.number(t[key], std::string("tolerances.") + key);
        if (!(dst >= 0.0)) r.error(t[key], std::string("tolerances.") + key, "must be nonnegative");
      }
    };
    set("residual", c.tolerances.residual);
    set("identity", c.tolerances.identity);
    set("zero", c.tolerances.zero);
    set("lemma", c.tolerances.lemma);
    set("psh", c.tolerances.psh);
    set("radiality", c.tolerances.radiality);
    set("ordering", c.tolerances.ordering);
    set("holder_slack", c.tolerances.holder_slack);
    set("min_r_squared", c.tolerances.min_r_squared);
    if (!(c.tolerances.residual > 0.0)) r.error(t["residual"], "tolerances.residual", "must be positive");
  }
  if (const auto k = root["constants"]) {
    r.expect_map(k, "constants", {"K", "C", "C1", "K_prime"});
    auto set = [&](const char* key, double& dst) {
      if (k[key]) {
        dst = r.number(k[key], std::string("constants.") + key);
        if (!(dst >= 0.0)) r.error(k[key], std::string("constants.") + key, "must be nonnegative");
      }
    };
    set("K", c.constants.K);
    set("C", c.constants.C);
    set("C1", c.constants.C1);
    set("K_prime", c.constants.K_prime);
  }
  if (const auto e = root["expect"]) {
    r.expect_map(e, "expect", {"l1_slope_min", "sup_slope_target", "sup_slope_tolerance", "stability_slope_target",
                               "stability_slope_tolerance"});
    if (e["l1_slope_min"]) c.expect.l1_slope_min = r.number(e["l1_slope_min"], "expect.l1_slope_min");
    if (e["sup_slope_target"]) c.expect.sup_slope_target = r.number(e["sup_slope_target"], "expect.sup_slope_target");
    if (e["sup_slope_tolerance"]) c.expect.sup_slope_tolerance = r.number(e["sup_slope_tolerance"], "expect.sup_slope_tolerance");
    if (e["stability_slope_target"])
      c.expect.stability_slope_target = r.number(e["stability_slope_target"], "expect.stability_slope_target");
    if (e["stability_slope_tolerance"])
      c.expect.stability_slope_tolerance = r.number(e["stability_slope_tolerance"], "expect.stability_slope_tolerance");
  }
  c.solver.residual_tolerance = c.tolerances.residual;
  if (const auto s = root["solver"]) {
    r.expect_map(s, "solver", {"max_iterations", "damping_factor", "max_backtracks", "max_linear_iterations",
                               "positivity_floor", "regularization_ladder"});
    if (s["max_iterations"]) c.solver.max_iterations = static_cast<int>(r.integer(s["max_iterations"], "solver.max_iterations"));
    if (s["damping_factor"]) c.solver.damping_factor = r.number(s["damping_factor"], "solver.damping_factor");
    if (s["max_backtracks"]) c.solver.max_backtracks = static_cast<int>(r.integer(s["max_backtracks"], "solver.max_backtracks"));
    if (s["max_linear_iterations"])
      c.solver.max_linear_iterations = static_cast<int>(r.integer(s["max_linear_iterations"], "solver.max_linear_iterations"));
    if (s["positivity_floor"]) c.solver.positivity_floor = r.number(s["positivity_floor"], "solver.positivity_floor");
    if (s["regularization_ladder"])
      c.solver.regularization_ladder = r.numbers(s["regularization_ladder"], "solver.regularization_ladder");
    try {
      c.solver.validate();
    } catch (const Error& e) {
      r.error(s, "solver", e.what());
    }
  }
  if (const auto o = root["output"]) {
    r.expect_map(o, "output", {"dir", "write_grids"});
    if (o["dir"]) c.output_dir = r.string(o["dir"], "output.dir");
    if (o["write_grids"]) c.write_grids = r.boolean(o["write_grids"], "output.write_grids");
  }

  // Presets each experiment needs.
  auto require = [&](bool ok, const char* field) {
    if (!ok) r.error(root, field, "required for experiment '" + to_string(c.kind) + "'");
  };
  switch (c.kind) {
    case ExperimentKind::Solve: require(c.density.has_value(), "density"); break;
    case ExperimentKind::Smooth: require(c.function.has_value(), "function"); break;
    case ExperimentKind::Curvature:
    case ExperimentKind::Lemma: require(c.metric.has_value(), "metric"); break;
    case ExperimentKind::Holder:
      require(c.density.has_value() != c.function.has_value(), "density or function (exactly one)");
      break;
    case ExperimentKind::Stability:
      require(c.density.has_value(), "density");
      require(c.perturbation.has_value(), "perturbation");
      break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace malab
