#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "thermoflow/potential.hpp"
#include "thermoflow/thermo.hpp"

namespace thermoflow {

/// A flow loaded from disk: either a bare shift with a roof, or a metric graph
/// together with its edge shift.
struct Model {
    FlowSystem system;
    std::shared_ptr<const GraphFlow> graph;  // null for bare shifts
};

nlohmann::json read_json(const std::filesystem::path& path);

/// {"transitions": [[...]], "roof": [...], "names": [...]}
/// {"vertices": n, "edges": [[from, to, length], ...]}
Model model_from_json(const nlohmann::json& j);
Model load_model(const std::filesystem::path& path);

/// {"kind": "constant", "value": c}
/// {"kind": "cylinder", "values": [...]}                       one per symbol
/// {"kind": "cylinder", "width": w, "anchor": a, "table": [{"word": [...], "value": v}, ...]}
/// {"kind": "distance", "reference": [cycle], "scale": s}     graphs only
Potential potential_from_json(const nlohmann::json& j, const Model& model);
Potential load_potential(const std::filesystem::path& path, const Model& model);
CylinderPotential cylinder_from_json(const nlohmann::json& j, const Model& model);

/// {"kind": "bernoulli", "p": [...]} or {"kind": "matrix", "p": [[...]]}
MarkovMeasure markov_from_json(const nlohmann::json& j, const Sft& sft);

/// FNV-1a of the canonical dump, 16 hex digits.
std::string config_hash(const nlohmann::json& config);

}  // namespace thermoflow
