#include "semiscat/config.hpp"

#include <fstream>

#include "semiscat/errors.hpp"

namespace semiscat {

namespace {

double require_number(const json& j, const std::string& key,
                      const std::string& path) {
    if (!j.contains(key))
        throw configuration_error(path + "." + key + ": missing");
    if (!j[key].is_number())
        throw configuration_error(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key,
                                const std::string& path) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array())
        throw configuration_error(path + "." + key + ": expected an array");
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw configuration_error(path + "." + key + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

Potential potential_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw configuration_error(path + ": expected an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw configuration_error(path + ".kind: missing or not a string");
    const std::string kind = j["kind"].get<std::string>();

    if (kind == "free") return Potential::free();
    if (kind == "square_barrier")
        return Potential::square_barrier(require_number(j, "height", path),
                                         require_number(j, "halfwidth", path));
    if (kind == "gaussian_barrier")
        return Potential::gaussian_barrier(require_number(j, "E0", path),
                                           number_or(j, "width", 1.0));
    if (kind == "well_in_island") {
        if (!j.contains("A")) return Potential::well_in_island();
        return Potential::well_in_island(
            require_number(j, "A", path), require_number(j, "a", path),
            require_number(j, "B", path), require_number(j, "b", path));
    }
    if (kind == "double_structure") {
        if (!j.contains("E0")) return Potential::double_structure();
        return Potential::double_structure(
            require_number(j, "E0", path), number_or(j, "w0", 1.0),
            require_number(j, "E1", path), number_or(j, "w1", 1.0),
            require_number(j, "separation", path));
    }
    if (kind == "power_tail")
        return Potential::power_tail(require_number(j, "amplitude", path),
                                     require_number(j, "rho", path));
    if (kind == "truncated") {
        if (!j.contains("base"))
            throw configuration_error(path + ".base: missing");
        const Potential base = potential_from_json(j["base"], path + ".base");
        return truncate(base, require_number(j, "R", path));
    }
    throw configuration_error(path + ".kind: unknown kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object())
        throw configuration_error("config: expected a JSON object");
    ExperimentConfig cfg;
    cfg.raw = doc;
    if (!doc.contains("command") || !doc["command"].is_string())
        throw configuration_error("command: missing or not a string");
    cfg.command = doc["command"].get<std::string>();

    if (doc.contains("potential"))
        cfg.potential = potential_from_json(doc["potential"]);

    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        GridSpec gs;
        gs.L = require_number(g, "L", "grid");
        gs.dx = require_number(g, "dx", "grid");
        if (gs.L <= 0 || gs.dx <= 0)
            throw configuration_error("grid: L and dx must be positive");
        cfg.grid = gs;
    }

    cfg.h_list = number_list(doc, "h_list", "config");
    cfg.lambda_list = number_list(doc, "lambda_list", "config");
    cfg.R_list = number_list(doc, "R_list", "config");
    cfg.t_list = number_list(doc, "t_list", "config");

    for (double h : cfg.h_list)
        if (h <= 0.0) throw configuration_error("h_list: entries must be positive");
    for (double l : cfg.lambda_list)
        if (l <= 0.0)
            throw configuration_error("lambda_list: entries must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw configuration_error("config: cannot open " + path);
    json doc;
    try {
        f >> doc;
    } catch (const std::exception& e) {
        throw configuration_error(std::string("config: parse error: ") + e.what());
    }
    return parse_config(doc);
}

double ExperimentConfig::get_number(const std::string& key,
                                    double fallback) const {
    if (!raw.contains(key)) return fallback;
    if (!raw[key].is_number())
        throw configuration_error(key + ": expected a number");
    return raw[key].get<double>();
}

CutoffSpec cutoff_from_config(const ExperimentConfig& cfg, double default_inner,
                              double default_outer) {
    CutoffSpec chi{default_inner, default_outer, 1.0};
    if (cfg.raw.contains("chi")) {
        const auto& c = cfg.raw["chi"];
        chi.inner = require_number(c, "inner", "chi");
        chi.outer = require_number(c, "outer", "chi");
        chi.amplitude = number_or(c, "amplitude", 1.0);
        if (!(0 < chi.inner && chi.inner < chi.outer))
            throw configuration_error("chi: need 0 < inner < outer");
    }
    return chi;
}

} // namespace semiscat
