#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mixlap/domain_io.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/format.hpp"
#include "mixlap/geometry.hpp"
#include "mixlap/mesh.hpp"

namespace mixlap {

// Triangle-style plain text mesh pair (.node / .ele). Node markers encode
// boundary provenance: 0 = interior, 1+arc = interior of that arc,
// 1+N+arc = the corner at which that arc starts (N = arc count).

inline void export_triangle(const Mesh& mesh, const DomainSpec& domain,
                            const std::string& base_path) {
    const int n_arcs = domain.arc_count();
    std::ofstream node_out(base_path + ".node");
    if (!node_out) throw IoError("cannot write " + base_path + ".node");
    node_out << mesh.node_count() << " 2 0 1\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        int marker = 0;
        const auto it = mesh.node_boundary_info.find(i);
        if (it != mesh.node_boundary_info.end()) {
            if (it->second.size() == 1) {
                marker = 1 + it->second.front().arc;
            } else {
                // corner: marker names the outgoing arc (the one with t = 0)
                int out_arc = it->second.front().arc;
                for (const BoundaryNodeInfo& bi : it->second)
                    if (bi.t < 0.5) out_arc = bi.arc;
                marker = 1 + n_arcs + out_arc;
            }
        }
        node_out << i << ' ' << format_double(mesh.nodes[static_cast<std::size_t>(i)].x) << ' '
                 << format_double(mesh.nodes[static_cast<std::size_t>(i)].y) << ' ' << marker
                 << '\n';
    }
    std::ofstream ele_out(base_path + ".ele");
    if (!ele_out) throw IoError("cannot write " + base_path + ".ele");
    ele_out << mesh.triangle_count() << " 3 0\n";
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        ele_out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
}

namespace detail {

inline std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream probe(line);
        std::string tok;
        if (probe >> tok) lines.push_back(line);
    }
    return lines;
}

/// Candidate arcs a boundary node may lie on; corner positions beat markers.
inline std::set<int> node_arc_candidates(const DomainSpec& domain, Vec2 p, int marker,
                                         const std::map<int, int>& marker_map) {
    std::set<int> cands;
    const double tol = 1e-9 * std::max(domain.diameter(), 1.0);
    for (const Corner& c : domain.corners()) {
        if (distance(c.position, p) <= tol) {
            cands.insert(c.arc_in);
            cands.insert(c.arc_out);
            return cands;
        }
    }
    const int n = domain.arc_count();
    if (!marker_map.empty()) {
        const auto it = marker_map.find(marker);
        if (it == marker_map.end())
            throw IoError("mesh import: boundary marker " + std::to_string(marker) +
                          " has no mapping in the domain file");
        cands.insert(it->second);
        return cands;
    }
    // canonical scheme from export_triangle
    if (marker >= 1 && marker <= n) {
        cands.insert(marker - 1);
    } else if (marker >= n + 1 && marker <= 2 * n) {
        const int out = marker - n - 1;
        cands.insert(out);
        cands.insert((out + n - 1) % n);
    } else {
        throw IoError("mesh import: boundary marker " + std::to_string(marker) +
                      " outside the canonical range and no mapping given");
    }
    return cands;
}

} // namespace detail

/// Reads a Triangle-style .node/.ele pair (pass the path without extension,
/// or the .node path). Boundary provenance is reconstructed from node markers
/// (via the optional sidecar mapping in the domain file) and closest-point
/// projection onto the source arcs. All mesh invariants are validated.
inline Mesh import_mesh(const std::string& path, const DomainFile& domain_file) {
    std::string base = path;
    if (base.size() > 5 && base.substr(base.size() - 5) == ".node") base.resize(base.size() - 5);
    const DomainSpec& domain = domain_file.domain;

    const auto node_lines = detail::read_data_lines(base + ".node");
    if (node_lines.empty()) throw IoError("mesh import: empty node file");
    Mesh mesh;
    mesh.domain_diameter = domain.diameter();
    int n_nodes = 0, dim = 0, n_attrs = 0, n_markers = 0;
    {
        std::istringstream h(node_lines[0]);
        if (!(h >> n_nodes >> dim)) throw IoError("mesh import: malformed node header");
        h >> n_attrs >> n_markers;
        if (dim != 2) throw IoError("mesh import: only 2D node files are supported");
        if (n_markers != 1) throw IoError("mesh import: node file must carry boundary markers");
        if (static_cast<int>(node_lines.size()) != n_nodes + 1)
            throw IoError("mesh import: node count does not match header");
    }
    std::vector<int> markers(static_cast<std::size_t>(n_nodes), 0);
    mesh.nodes.resize(static_cast<std::size_t>(n_nodes));
    int index_base = 0;
    for (int i = 0; i < n_nodes; ++i) {
        std::istringstream l(node_lines[static_cast<std::size_t>(i) + 1]);
        int id = 0;
        double x = 0, y = 0;
        if (!(l >> id >> x >> y)) throw IoError("mesh import: malformed node line");
        for (int a = 0; a < n_attrs; ++a) {
            double skip;
            l >> skip;
        }
        int m = 0;
        if (!(l >> m)) throw IoError("mesh import: node line missing boundary marker");
        if (i == 0) index_base = id;
        const int row = id - index_base;
        if (row < 0 || row >= n_nodes) throw IoError("mesh import: node index out of range");
        mesh.nodes[static_cast<std::size_t>(row)] = {x, y};
        markers[static_cast<std::size_t>(row)] = m;
    }

    const auto ele_lines = detail::read_data_lines(base + ".ele");
    if (ele_lines.empty()) throw IoError("mesh import: empty element file");
    int n_tris = 0, npt = 0;
    {
        std::istringstream h(ele_lines[0]);
        if (!(h >> n_tris >> npt)) throw IoError("mesh import: malformed element header");
        if (npt != 3) throw IoError("mesh import: only linear triangles are supported");
        if (static_cast<int>(ele_lines.size()) != n_tris + 1)
            throw IoError("mesh import: element count does not match header");
    }
    mesh.triangles.resize(static_cast<std::size_t>(n_tris));
    for (int t = 0; t < n_tris; ++t) {
        std::istringstream l(ele_lines[static_cast<std::size_t>(t) + 1]);
        int id = 0, a = 0, b = 0, c = 0;
        if (!(l >> id >> a >> b >> c)) throw IoError("mesh import: malformed element line");
        mesh.triangles[static_cast<std::size_t>(t)] = {a - index_base, b - index_base,
                                                       c - index_base};
    }

    // boundary edges = edges incident to exactly one triangle
    std::map<detail::EdgeKey, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            edge_count[detail::EdgeKey(tri[static_cast<std::size_t>(e)],
                                       tri[static_cast<std::size_t>((e + 1) % 3)])]++;
    const double proj_tol = 1e-6 * std::max(domain.diameter(), 1.0);
    for (const auto& [key, cnt] : edge_count) {
        if (cnt != 1) continue;
        if (markers[static_cast<std::size_t>(key.a)] == 0 ||
            markers[static_cast<std::size_t>(key.b)] == 0)
            throw IoError("mesh import: invariant violation: unmatched edge touching an "
                          "interior-marked node (hanging node?)");
        const Vec2 pa = mesh.nodes[static_cast<std::size_t>(key.a)];
        const Vec2 pb = mesh.nodes[static_cast<std::size_t>(key.b)];
        const auto ca = detail::node_arc_candidates(domain, pa, markers[static_cast<std::size_t>(key.a)],
                                                    domain_file.boundary_markers);
        const auto cb = detail::node_arc_candidates(domain, pb, markers[static_cast<std::size_t>(key.b)],
                                                    domain_file.boundary_markers);
        std::vector<int> common;
        for (int arc : ca)
            if (cb.count(arc)) common.push_back(arc);
        if (common.empty())
            throw IoError("mesh import: boundary edge endpoints lie on different arcs");
        int arc = common.front();
        if (common.size() > 1) {
            // choose by projection distance of the chord midpoint
            double best = 1e300;
            for (int cand : common) {
                const Vec2 m = 0.5 * (pa + pb);
                const double t = domain.arc(cand).closest_param(m);
                const double d = distance(domain.arc(cand).point(t), m);
                if (d < best) {
                    best = d;
                    arc = cand;
                }
            }
        }
        const double ta = domain.arc(arc).closest_param(pa);
        const double tb = domain.arc(arc).closest_param(pb);
        if (distance(domain.arc(arc).point(ta), pa) > proj_tol ||
            distance(domain.arc(arc).point(tb), pb) > proj_tol)
            throw IoError("mesh import: boundary node does not lie on its source arc");
        BoundaryEdge be;
        be.a = key.a;
        be.b = key.b;
        be.arc = arc;
        be.t0 = ta;
        be.t1 = tb;
        be.label = domain.arc(arc).label();
        mesh.boundary_edges.push_back(be);
        mesh.node_boundary_info[key.a];
        mesh.node_boundary_info[key.b];
    }
    // node provenance: one entry per incident arc
    for (auto& [node, infos] : mesh.node_boundary_info) {
        std::set<int> arcs_here;
        for (const BoundaryEdge& be : mesh.boundary_edges) {
            if (be.a == node && arcs_here.insert(be.arc).second)
                infos.push_back({be.arc, be.t0});
            else if (be.b == node && arcs_here.insert(be.arc).second)
                infos.push_back({be.arc, be.t1});
        }
    }

    try {
        validate(mesh);
    } catch (const MeshError& e) {
        throw IoError(std::string("mesh import: invariant violation: ") + e.what());
    }
    return mesh;
}

/// Legacy-ASCII VTK unstructured grid with optional per-node scalar fields
/// and per-triangle vector fields. Output is byte-stable for identical input.
inline void export_vtk(const Mesh& mesh,
                       const std::vector<std::pair<std::string, std::vector<double>>>& point_fields,
                       const std::vector<std::pair<std::string, std::vector<Vec2>>>& cell_fields,
                       const std::string& path) {
    for (const auto& [name, values] : point_fields)
        if (static_cast<int>(values.size()) != mesh.node_count())
            throw IoError("export_vtk: point field \"" + name + "\" has wrong size");
    for (const auto& [name, values] : cell_fields)
        if (static_cast<int>(values.size()) != mesh.triangle_count())
            throw IoError("export_vtk: cell field \"" + name + "\" has wrong size");

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "mixlap mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.node_count() << " double\n";
    for (const Vec2& p : mesh.nodes)
        out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
    for (const auto& tri : mesh.triangles)
        out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    out << "CELL_TYPES " << mesh.triangle_count() << '\n';
    for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
    if (!point_fields.empty()) {
        out << "POINT_DATA " << mesh.node_count() << '\n';
        for (const auto& [name, values] : point_fields) {
            out << "SCALARS " << name << " double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (double v : values) out << format_double(v) << '\n';
        }
    }
    if (!cell_fields.empty()) {
        out << "CELL_DATA " << mesh.triangle_count() << '\n';
        for (const auto& [name, values] : cell_fields) {
            out << "VECTORS " << name << " double\n";
            for (const Vec2& v : values)
                out << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
        }
    }
}

} // namespace mixlap
