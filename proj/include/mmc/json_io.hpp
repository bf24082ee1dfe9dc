#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mmc/core.hpp"
#include "mmc/magnets.hpp"
#include "mmc/montecarlo.hpp"
#include "mmc/planner.hpp"
#include "mmc/shapes.hpp"

namespace mmc {

using ordered_json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

inline ordered_json parse_json(const std::string& text, const std::string& what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in " + what);
    return j;
}

// Catalog format: {"types":[{"name":"magenta","planar":true,
//                            "L":"S","FB":"N","TU":"0","R":"N"}, ...]}
inline Catalog catalog_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("types") || !j["types"].is_array())
        throw DataError("catalog JSON must be an object with a \"types\" array");
    std::vector<CubeType> types;
    for (const auto& t : j["types"]) {
        std::string name = t.value("name", std::string());
        if (name.empty()) throw DataError("catalog type without a name");
        for (const char* key : {"L", "FB", "TU", "R"})
            if (!t.contains(key) || !t[key].is_string())
                throw DataError("catalog type '" + name + "' is missing face \"" + key + "\"");
        CubeType ct;
        ct.name = name;
        try {
            ct.arrangement.left = parse_polarity(t["L"].get<std::string>());
            ct.arrangement.front_back = parse_polarity(t["FB"].get<std::string>());
            ct.arrangement.top_under = parse_polarity(t["TU"].get<std::string>());
            ct.arrangement.right = parse_polarity(t["R"].get<std::string>());
        } catch (const DataError& e) {
            throw DataError("catalog type '" + name + "': " + e.what());
        }
        if (!t.contains("planar") || !t["planar"].is_boolean())
            throw DataError("catalog type '" + name + "' needs a boolean \"planar\"");
        ct.planar = t["planar"].get<bool>();
        types.push_back(std::move(ct));
    }
    return Catalog(std::move(types));
}

inline Catalog load_catalog(const std::string& path) {
    return catalog_from_json(parse_json(read_file(path), path));
}

inline ordered_json catalog_to_json(const Catalog& cat) {
    ordered_json types = ordered_json::array();
    for (const CubeType& t : cat.types()) {
        ordered_json e;
        e["name"] = t.name;
        e["planar"] = t.planar;
        e["L"] = std::string(1, polarity_token(t.arrangement.left));
        e["FB"] = std::string(1, polarity_token(t.arrangement.front_back));
        e["TU"] = std::string(1, polarity_token(t.arrangement.top_under));
        e["R"] = std::string(1, polarity_token(t.arrangement.right));
        types.push_back(std::move(e));
    }
    ordered_json j;
    j["types"] = std::move(types);
    return j;
}

inline ordered_json cells_to_json(const ColoredShape& shape, const Catalog& cat) {
    ordered_json arr = ordered_json::array();
    for (const PlacedCube& c : shape.cubes()) {
        ordered_json e;
        e["x"] = c.cell.x;
        e["y"] = c.cell.y;
        e["z"] = c.cell.z;
        e["color"] = cat.type(c.type).name;
        arr.push_back(std::move(e));
    }
    return arr;
}

inline ordered_json shapes_to_json(const std::vector<ColoredShape>& shapes, const Catalog& cat) {
    ordered_json arr = ordered_json::array();
    for (const ColoredShape& s : shapes) arr.push_back(cells_to_json(s, cat));
    return arr;
}

inline std::vector<PlacedCube> cubes_from_json(const ordered_json& arr, const Catalog& cat,
                                               const std::string& what) {
    if (!arr.is_array() || arr.empty())
        throw DataError(what + " must be a non-empty JSON array of cells");
    std::vector<PlacedCube> cubes;
    for (const auto& e : arr) {
        if (!e.is_object() || !e.contains("x") || !e.contains("y") || !e.contains("color"))
            throw DataError(what + ": each cell needs x, y and color");
        PlacedCube c;
        c.cell.x = e["x"].get<int>();
        c.cell.y = e["y"].get<int>();
        c.cell.z = e.value("z", 0);
        c.type = std::uint8_t(cat.index_of(e["color"].get<std::string>()));
        cubes.push_back(c);
    }
    return cubes;
}

// A shapes file is a list of shapes; a single shape (list of cells) is
// accepted too.
inline std::vector<ColoredShape> shapes_from_json(const ordered_json& j, const Catalog& cat) {
    if (!j.is_array() || j.empty()) throw DataError("shapes file must be a non-empty JSON array");
    std::vector<ColoredShape> out;
    if (j[0].is_object()) {
        out.push_back(canonicalize(cubes_from_json(j, cat, "shape")));
        return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(canonicalize(cubes_from_json(j[i], cat, "shape " + std::to_string(i))));
    return out;
}

inline ordered_json plan_to_json(const PlanResult& plan, const Catalog& cat) {
    ordered_json j = ordered_json::object();
    for (const auto& [shape, entry] : plan.shapes) {
        ordered_json e;
        e["cells"] = cells_to_json(shape, cat);
        e["moves"] = entry.moves;
        e["translation_steps"] = entry.translation_steps;
        j[shape.id(cat)] = std::move(e);
    }
    return j;
}

inline ordered_json stats_to_json(const AggregateStats& s) {
    ordered_json j;
    j["trials"] = s.trials;
    j["restarts"] = s.restarts;
    j["censored_trials"] = s.censored_trials;
    j["seed"] = std::to_string(s.master_seed);
    j["max_shapes"] = s.max_shapes;
    j["samples"] = s.samples;
    j["median_first_start"] = s.median_first_start();
    j["full_coverage_fraction"] = s.full_coverage_fraction();
    j["cumulative_mean"] = s.cumulative_mean;
    j["start_count_hist"] = s.start_count_hist;
    ordered_json shapes = ordered_json::array();
    for (std::size_t i = 0; i < s.shape_ids.size(); ++i) {
        ordered_json e;
        e["id"] = s.shape_ids[i];
        e["frequency"] = s.samples ? double(s.reach_counts[i]) / double(s.samples) : 0.0;
        e["reachable_trials"] = s.steps_by_shape[i].size();
        const auto& steps = s.steps_by_shape[i];
        if (steps.empty()) {
            e["min_steps"] = nullptr;
            e["median_steps"] = nullptr;
            e["mean_steps"] = nullptr;
            e["max_steps"] = nullptr;
        } else {
            auto [mn, mx] = std::minmax_element(steps.begin(), steps.end());
            e["min_steps"] = *mn;
            e["median_steps"] = detail::median_of(steps);
            e["mean_steps"] = detail::mean_of(steps);
            e["max_steps"] = *mx;
        }
        shapes.push_back(std::move(e));
    }
    j["shapes"] = std::move(shapes);
    return j;
}

inline std::string export_stats(const AggregateStats& s, const std::string& format) {
    if (format == "csv") return stats_to_csv(s);
    if (format == "json") return stats_to_json(s).dump(2) + "\n";
    throw DataError("unknown stats format '" + format + "' (expected csv or json)");
}

}  // namespace mmc
