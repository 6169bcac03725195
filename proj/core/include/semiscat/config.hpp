#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

using json = nlohmann::json;

/// Parsed experiment configuration. Schema violations throw
/// configuration_error carrying the offending field path.
struct ExperimentConfig {
    std::string command;
    Potential potential = Potential::free();
    std::optional<GridSpec> grid;
    std::vector<double> h_list;
    std::vector<double> lambda_list;
    std::vector<double> R_list;
    std::vector<double> t_list;
    json raw;  // the full document, echoed into manifests

    double get_number(const std::string& key, double fallback) const;
    bool has(const std::string& key) const { return raw.contains(key); }
};

Potential potential_from_json(const json& j, const std::string& path = "potential");
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::string& path);

CutoffSpec cutoff_from_config(const ExperimentConfig& cfg,
                              double default_inner = 1.0,
                              double default_outer = 2.0);

} // namespace semiscat
