#include "thermoflow/io.hpp"

#include <cstdio>
#include <fstream>

#include "thermoflow/errors.hpp"

namespace thermoflow {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParameterError(path.string() + ": " + e.what());
    }
}

Model model_from_json(const json& j) {
    try {
        if (j.contains("edges")) {
            std::vector<GraphEdge> edges;
            for (const auto& e : j.at("edges")) {
                if (e.is_array())
                    edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.size() > 2 ? e.at(2).get<double>() : 1.0});
                else
                    edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(), e.value("length", 1.0)});
            }
            auto g = std::make_shared<const GraphFlow>(MetricGraph(j.at("vertices").get<int>(), std::move(edges)));
            return {g->system(), g};
        }
        const auto t = j.at("transitions").get<std::vector<std::vector<int>>>();
        Sft sft(t, j.value("names", std::vector<std::string>{}));
        auto roof = j.value("roof", std::vector<double>(sft.size(), 1.0));
        return {FlowSystem(std::move(sft), std::move(roof)), nullptr};
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed model: ") + e.what());
    }
}

Model load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

CylinderPotential cylinder_from_json(const json& j, const Model& model) {
    const Sft& sft = model.system.sft();
    try {
        const auto kind = j.value("kind", std::string("cylinder"));
        if (kind == "constant") return CylinderPotential::constant(sft, j.at("value").get<double>());
        if (kind != "cylinder") throw ParameterError("observable must be a cylinder potential, got " + kind);
        if (j.contains("values")) return CylinderPotential::per_symbol(sft, j.at("values").get<std::vector<double>>());
        std::map<Word, double> table;
        for (const auto& row : j.at("table")) table[row.at("word").get<Word>()] = row.at("value").get<double>();
        return CylinderPotential(sft, j.at("width").get<int>(), j.value("anchor", 0), table);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed potential: ") + e.what());
    }
}

Potential potential_from_json(const json& j, const Model& model) {
    if (j.value("kind", std::string()) != "distance") return cylinder_from_json(j, model);
    if (!model.graph) throw ParameterError("distance potentials need a graph model");
    try {
        const auto cycle = j.at("reference").get<Word>();
        return DistancePotential{model.graph, model.graph->periodic_geodesic(cycle), j.value("scale", 1.0)};
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed potential: ") + e.what());
    }
}

Potential load_potential(const std::filesystem::path& path, const Model& model) { return potential_from_json(read_json(path), model); }

MarkovMeasure markov_from_json(const json& j, const Sft& sft) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "bernoulli") return MarkovMeasure::bernoulli(sft, j.at("p").get<std::vector<double>>());
        if (kind == "matrix") return MarkovMeasure::from_matrix(sft, j.at("p").get<std::vector<std::vector<double>>>());
        throw ParameterError("unknown measure kind " + kind);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed measure: ") + e.what());
    }
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace thermoflow
