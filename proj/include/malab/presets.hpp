// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "malab/curvature.hpp"
#include "malab/grid.hpp"
#include "malab/ma_solver.hpp"

namespace malab {

using Json = nlohmann::json;

enum class PresetFamily { Density, Function, Metric };

std::string to_string(PresetFamily family);

struct ParamSpec {
  std::string name;
  std::string type;  // "number", "integer", "vector", "modes", "names", "string"
  Json default_value;
  std::string doc;
};

struct PresetInfo {
  PresetFamily family;
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<PresetInfo>& preset_catalog();
const PresetInfo& find_preset(PresetFamily family, const std::string& name);

/// Fills defaults and rejects unknown or mistyped parameters. Defaults that
/// depend on the dimension (mode vectors, centres) are resolved against n.
Json resolve_params(PresetFamily family, const std::string& name, const Json& given, int n);

GridFunction build_function(const std::string& name, const Json& params, const TorusGrid& grid);
Density build_density(const std::string& name, const Json& params, const TorusGrid& grid);
MetricSpec build_metric(const std::string& name, const Json& params);

/// Potential behind the "manufactured" density preset.
GridFunction manufactured_potential(const Json& params, const TorusGrid& grid);

/// A (ρ² + δ²)^α around z0 with δ = delta_cells·h and A chosen so that the
/// smallest eigenvalue of I + H is `min_eigenvalue`.
GridFunction holder_potential(double alpha, const TorusGrid& grid, const std::vector<double>& z0, double delta_cells,
                              double min_eigenvalue, double* amplitude = nullptr);

/// a·G where ¼ΔG = ρ_δ − 1 in each complex coordinate, ρ_δ a periodic
/// Gaussian bump of unit mass and width δ centred at z0.
GridFunction log_potential(double weight, const TorusGrid& grid, const std::vector<double>& z0, double delta_cells);

}  // namespace malab
