#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixlap/errors.hpp"
#include "mixlap/geometry.hpp"

namespace mixlap {

/// Parsed domain file: the loop itself, an optional default rotation and an
/// optional mapping from external mesh boundary markers to arc indices.
struct DomainFile {
    DomainSpec domain;
    std::optional<double> rotation;
    std::map<int, int> boundary_markers;  // marker -> arc index
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw IoError("domain file: unknown key \"" + it.key() + "\" in " + where);
    }
}

inline Vec2 parse_point(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw IoError("domain file: " + where + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<double> parse_coeffs(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw IoError("domain file: " + where + " must be a coefficient array");
    std::vector<double> c;
    for (const auto& v : j) {
        if (!v.is_number()) throw IoError("domain file: " + where + " must contain numbers");
        c.push_back(v.get<double>());
    }
    return c;
}

inline BoundaryLabel parse_label(const nlohmann::json& j) {
    if (!j.is_string()) throw IoError("domain file: arc label must be a string");
    const std::string s = j.get<std::string>();
    if (s == "gamma") return BoundaryLabel::Gamma;
    if (s == "gammac" || s == "gamma_c") return BoundaryLabel::GammaC;
    throw IoError("domain file: unknown arc label \"" + s + "\" (expected gamma|gammac)");
}

inline Arc parse_arc(const nlohmann::json& j, int index) {
    const std::string where = "arcs[" + std::to_string(index) + "]";
    if (!j.is_object()) throw IoError("domain file: " + where + " must be an object");
    reject_unknown_keys(j, {"kind", "data", "label"}, where);
    if (!j.contains("kind") || !j.contains("data") || !j.contains("label"))
        throw IoError("domain file: " + where + " requires kind, data and label");
    const std::string kind = j.at("kind").get<std::string>();
    const BoundaryLabel label = parse_label(j.at("label"));
    const nlohmann::json& d = j.at("data");
    if (!d.is_object()) throw IoError("domain file: " + where + ".data must be an object");

    if (kind == "segment") {
        reject_unknown_keys(d, {"p0", "p1"}, where + ".data");
        return Arc::segment(parse_point(d.at("p0"), where + ".p0"),
                            parse_point(d.at("p1"), where + ".p1"), label);
    }
    if (kind == "circular-arc") {
        reject_unknown_keys(d, {"center", "radius", "angle0", "angle1"}, where + ".data");
        return Arc::circular(parse_point(d.at("center"), where + ".center"),
                             d.at("radius").get<double>(), d.at("angle0").get<double>(),
                             d.at("angle1").get<double>(), label);
    }
    if (kind == "polynomial-parametric" || kind == "polynomial") {
        reject_unknown_keys(d, {"x", "y"}, where + ".data");
        return Arc::polynomial(parse_coeffs(d.at("x"), where + ".x"),
                               parse_coeffs(d.at("y"), where + ".y"), label);
    }
    throw IoError("domain file: unknown arc kind \"" + kind + "\"");
}

} // namespace detail

inline DomainFile parse_domain_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw IoError("domain file: top level must be an object");
    detail::reject_unknown_keys(doc, {"arcs", "rotation", "boundary_markers"}, "top level");
    if (!doc.contains("arcs") || !doc.at("arcs").is_array())
        throw IoError("domain file: required key \"arcs\" (array) missing");

    std::vector<Arc> arcs;
    int i = 0;
    for (const auto& aj : doc.at("arcs")) arcs.push_back(detail::parse_arc(aj, i++));

    std::optional<double> rotation;
    if (doc.contains("rotation")) {
        if (!doc.at("rotation").is_number())
            throw IoError("domain file: rotation must be a number (radians)");
        rotation = doc.at("rotation").get<double>();
    }

    std::map<int, int> markers;
    if (doc.contains("boundary_markers")) {
        const auto& m = doc.at("boundary_markers");
        if (!m.is_object()) throw IoError("domain file: boundary_markers must be an object");
        for (auto it = m.begin(); it != m.end(); ++it) {
            int key = 0;
            try {
                key = std::stoi(it.key());
            } catch (const std::exception&) {
                throw IoError("domain file: boundary_markers keys must be integers");
            }
            if (!it.value().is_number_integer())
                throw IoError("domain file: boundary_markers values must be arc indices");
            const int arc = it.value().get<int>();
            if (arc < 0 || arc >= static_cast<int>(arcs.size()))
                throw IoError("domain file: boundary_markers arc index out of range");
            markers[key] = arc;
        }
    }

    try {
        return DomainFile{DomainSpec(std::move(arcs)), rotation, std::move(markers)};
    } catch (const GeometryError& e) {
        throw IoError(std::string("domain file: invalid geometry: ") + e.what());
    }
}

inline DomainFile load_domain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open domain file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("domain file " + path + ": " + e.what());
    }
    return parse_domain_json(doc);
}

} // namespace mixlap
