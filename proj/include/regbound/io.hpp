#pragma once

/**
 * JSON readers and writers: distribution configs, trained models, evaluation
 * results and run manifests.
 *
 * Distribution config:
 *   {"B": 1.0, "points": [{"id": "x0", "weight": 1.0, "cond": [[-1.0, 0.5], [1.0, 0.5]]}]}
 */

#include "adversarial.hpp"
#include "distributions.hpp"
#include "error.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace regbound {

using json = nlohmann::json;

inline json read_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw parse_error("cannot open '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw parse_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream os(path);
    if (!os)
        throw invalid_argument("cannot open '" + path + "' for writing");
    os << text;
    if (!os)
        throw invalid_argument("write to '" + path + "' failed");
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& what)
{
    throw parse_error(path + ": " + what);
}

inline double require_number(const json& j, const std::string& path)
{
    if (!j.is_number())
        config_error(path, "expected a number");
    return j.get<double>();
}

} // namespace detail

/// Builds a distribution, reporting the first violated invariant with its
/// JSON path ("$.points[1].cond[0][1]: ...").
inline FiniteDistribution distribution_from_json(const json& j)
{
    using detail::config_error;
    using detail::require_number;
    if (!j.is_object())
        config_error("$", "expected an object");
    if (!j.contains("B"))
        config_error("$.B", "missing");
    const double B = require_number(j.at("B"), "$.B");
    if (!(B > 0.0) || !std::isfinite(B))
        config_error("$.B", "must be a positive finite number");
    if (!j.contains("points"))
        config_error("$.points", "missing");
    const json& pts = j.at("points");
    if (!pts.is_array() || pts.empty())
        config_error("$.points", "expected a non-empty array");

    std::vector<InputPoint> points;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string base = "$.points[" + std::to_string(i) + "]";
        const json& p = pts[i];
        if (!p.is_object())
            config_error(base, "expected an object");
        if (!p.contains("id") || !p.at("id").is_string())
            config_error(base + ".id", "expected a string");
        const std::string id = p.at("id").get<std::string>();
        if (!seen.insert(id).second)
            config_error(base + ".id", "duplicate input id '" + id + "'");
        if (!p.contains("weight"))
            config_error(base + ".weight", "missing");
        const double weight = require_number(p.at("weight"), base + ".weight");
        if (!(weight > 0.0) || !std::isfinite(weight))
            config_error(base + ".weight", "must be positive");
        if (!p.contains("cond") || !p.at("cond").is_array() || p.at("cond").empty())
            config_error(base + ".cond", "expected a non-empty array of [label, mass] pairs");
        std::vector<Atom> atoms;
        const json& cond = p.at("cond");
        for (std::size_t k = 0; k < cond.size(); ++k) {
            const std::string apath = base + ".cond[" + std::to_string(k) + "]";
            if (!cond[k].is_array() || cond[k].size() != 2)
                config_error(apath, "expected [label, mass]");
            const double label = require_number(cond[k][0], apath + "[0]");
            const double mass = require_number(cond[k][1], apath + "[1]");
            if (!(std::abs(label) <= B))
                config_error(apath + "[0]", "label " + std::to_string(label) + " outside [-B, B]");
            if (!(mass > 0.0))
                config_error(apath + "[1]", "mass must be positive");
            atoms.push_back({label, mass});
        }
        try {
            points.push_back({id, weight, Conditional(std::move(atoms), B)});
        } catch (const invalid_argument& e) {
            config_error(base + ".cond", e.what());
        }
    }
    try {
        return FiniteDistribution(std::move(points), B);
    } catch (const invalid_argument& e) {
        config_error("$.points", e.what());
    }
}

inline FiniteDistribution load_distribution(const std::string& path)
{
    return distribution_from_json(read_json_file(path));
}

inline json distribution_to_json(const FiniteDistribution& dist)
{
    json pts = json::array();
    for (const auto& p : dist.points()) {
        json cond = json::array();
        for (const Atom& a : p.cond.atoms())
            cond.push_back({a.label, a.mass});
        pts.push_back({{"id", p.id}, {"weight", p.weight}, {"cond", cond}});
    }
    return {{"B", dist.bound()}, {"points", pts}};
}

inline json model_to_json(const TrainResult& r)
{
    return {{"w", r.model.weights},
            {"b", r.model.bias},
            {"objective", r.objective},
            {"iters", r.iters},
            {"method", r.method}};
}

inline LinearModel model_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("w") || !j.at("w").is_array())
        detail::config_error("$.w", "expected an array of weights");
    LinearModel m;
    for (std::size_t k = 0; k < j.at("w").size(); ++k)
        m.weights.push_back(detail::require_number(j.at("w")[k], "$.w[" + std::to_string(k) + "]"));
    if (!j.contains("b"))
        detail::config_error("$.b", "missing");
    m.bias = detail::require_number(j.at("b"), "$.b");
    return m;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Digest of a config object. Object keys are stored sorted, so the digest
/// does not depend on key order in the source file.
inline std::string config_digest(const json& config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

inline constexpr const char* tool_version = "0.1.0";

struct RunManifest
{
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string tool_version = regbound::tool_version;
    std::vector<std::string> outputs;
};

inline json manifest_to_json(const RunManifest& m)
{
    return {{"command", m.command},
            {"config_digest", m.config_digest},
            {"seed", m.seed},
            {"tool_version", m.tool_version},
            {"outputs", m.outputs}};
}

inline std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

} // namespace regbound
