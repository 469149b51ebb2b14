#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "mixlap/errors.hpp"
#include "mixlap/geometry.hpp"

namespace mixlap {

/// Boundary edge with provenance: which arc generated it and the parameter
/// sub-interval it covers.
struct BoundaryEdge {
    int a = -1;
    int b = -1;
    int arc = -1;
    double t0 = 0.0;
    double t1 = 0.0;
    BoundaryLabel label = BoundaryLabel::Gamma;
};

struct BoundaryNodeInfo {
    int arc = -1;
    double t = 0.0;
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    std::map<int, std::vector<BoundaryNodeInfo>> node_boundary_info;
    double domain_diameter = 0.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    double triangle_area(int t) const {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        const Vec2 a = nodes[static_cast<std::size_t>(tri[0])];
        const Vec2 b = nodes[static_cast<std::size_t>(tri[1])];
        const Vec2 c = nodes[static_cast<std::size_t>(tri[2])];
        return 0.5 * (b - a).cross(c - a);
    }

    Vec2 centroid(int t) const {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        return (nodes[static_cast<std::size_t>(tri[0])] + nodes[static_cast<std::size_t>(tri[1])] +
                nodes[static_cast<std::size_t>(tri[2])]) /
               3.0;
    }

    double total_area() const {
        double s = 0.0;
        for (int t = 0; t < triangle_count(); ++t) s += triangle_area(t);
        return s;
    }

    double max_edge_length() const {
        double m = 0.0;
        for (const auto& tri : triangles)
            for (int e = 0; e < 3; ++e)
                m = std::max(m, distance(nodes[static_cast<std::size_t>(tri[e])],
                                         nodes[static_cast<std::size_t>(tri[(e + 1) % 3])]));
        return m;
    }

    double min_angle_deg() const {
        double m = 180.0;
        for (const auto& tri : triangles) {
            for (int k = 0; k < 3; ++k) {
                const Vec2 p = nodes[static_cast<std::size_t>(tri[k])];
                const Vec2 u = nodes[static_cast<std::size_t>(tri[(k + 1) % 3])] - p;
                const Vec2 v = nodes[static_cast<std::size_t>(tri[(k + 2) % 3])] - p;
                const double ang = std::atan2(std::abs(u.cross(v)), u.dot(v));
                m = std::min(m, ang * 180.0 / M_PI);
            }
        }
        return m;
    }

    bool is_boundary_node(int n) const { return node_boundary_info.count(n) > 0; }

    /// true if node n touches a boundary edge with the given label
    bool node_on_label(int n, BoundaryLabel l) const;
};

namespace detail {

struct EdgeKey {
    int a, b;
    EdgeKey(int u, int v) : a(std::min(u, v)), b(std::max(u, v)) {}
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

} // namespace detail

inline bool Mesh::node_on_label(int n, BoundaryLabel l) const {
    for (const BoundaryEdge& e : boundary_edges)
        if ((e.a == n || e.b == n) && e.label == l) return true;
    return false;
}

/// Structural invariants: positive triangle areas, conforming edges, a single
/// closed boundary loop matching the boundary_edges list, both labels present.
inline void validate(const Mesh& mesh) {
    if (mesh.triangles.empty()) throw MeshError("mesh has no triangles");
    const double area_floor = 1e-14 * mesh.domain_diameter * mesh.domain_diameter;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int n = mesh.triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
            if (n < 0 || n >= mesh.node_count()) throw MeshError("triangle node index out of range");
        }
        if (mesh.triangle_area(t) <= area_floor)
            throw MeshError("triangle " + std::to_string(t) + " has non-positive area");
    }

    std::map<detail::EdgeKey, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            edge_count[detail::EdgeKey(tri[static_cast<std::size_t>(e)],
                                       tri[static_cast<std::size_t>((e + 1) % 3)])]++;

    std::set<detail::EdgeKey> boundary_set;
    for (const BoundaryEdge& be : mesh.boundary_edges) {
        const detail::EdgeKey k(be.a, be.b);
        if (!boundary_set.insert(k).second) throw MeshError("duplicate boundary edge");
        auto it = edge_count.find(k);
        if (it == edge_count.end()) throw MeshError("boundary edge does not belong to any triangle");
        if (it->second != 1) throw MeshError("boundary edge shared by more than one triangle");
    }
    for (const auto& [k, c] : edge_count) {
        if (c == 1) {
            if (!boundary_set.count(k))
                throw MeshError("non-conforming mesh: unmatched edge (hanging node?)");
        } else if (c != 2) {
            throw MeshError("edge shared by more than two triangles");
        }
    }

    // boundary edges form one closed loop
    std::map<int, std::vector<int>> adj;
    for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
        adj[mesh.boundary_edges[i].a].push_back(static_cast<int>(i));
        adj[mesh.boundary_edges[i].b].push_back(static_cast<int>(i));
    }
    for (const auto& [n, es] : adj)
        if (es.size() != 2) throw MeshError("boundary node with degree != 2");
    std::set<int> seen_edges;
    int cur_edge = 0;
    int cur_node = mesh.boundary_edges[0].a;
    for (std::size_t step = 0; step < mesh.boundary_edges.size(); ++step) {
        seen_edges.insert(cur_edge);
        const BoundaryEdge& e = mesh.boundary_edges[static_cast<std::size_t>(cur_edge)];
        cur_node = (e.a == cur_node) ? e.b : e.a;
        int next = -1;
        for (int cand : adj[cur_node])
            if (!seen_edges.count(cand)) next = cand;
        if (next < 0) break;
        cur_edge = next;
    }
    if (seen_edges.size() != mesh.boundary_edges.size())
        throw MeshError("boundary edges do not form a single closed loop");

    bool has_g = false, has_gc = false;
    for (const BoundaryEdge& be : mesh.boundary_edges)
        (be.label == BoundaryLabel::Gamma ? has_g : has_gc) = true;
    if (!has_g || !has_gc) throw MeshError("boundary labels do not cover both parts");

    for (const auto& [n, infos] : mesh.node_boundary_info)
        if (infos.empty() || n < 0 || n >= mesh.node_count())
            throw MeshError("invalid boundary node info");
}

namespace detail {

/// Greedy ear clipping choosing, at every step, the ear with the best worst
/// angle. O(n^2) overall, adequate for the coarse initial polygon.
inline std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw MeshError("polygon with fewer than 3 vertices");
    std::vector<int> ring(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ring[static_cast<std::size_t>(i)] = i;

    const auto tri_min_angle = [&pts](int a, int b, int c) {
        double m = M_PI;
        const Vec2 P[3] = {pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)],
                           pts[static_cast<std::size_t>(c)]};
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = P[(k + 1) % 3] - P[k], v = P[(k + 2) % 3] - P[k];
            m = std::min(m, std::atan2(std::abs(u.cross(v)), u.dot(v)));
        }
        return m;
    };
    const auto in_triangle = [&pts](int a, int b, int c, int p) {
        const Vec2 A = pts[static_cast<std::size_t>(a)], B = pts[static_cast<std::size_t>(b)],
                   C = pts[static_cast<std::size_t>(c)], P = pts[static_cast<std::size_t>(p)];
        const double d1 = (B - A).cross(P - A);
        const double d2 = (C - B).cross(P - B);
        const double d3 = (A - C).cross(P - C);
        const double eps = -1e-14 * ((B - A).norm() + (C - B).norm() + (A - C).norm());
        return d1 >= eps && d2 >= eps && d3 >= eps;
    };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(n - 2));
    while (ring.size() > 3) {
        const int m = static_cast<int>(ring.size());
        int best = -1;
        double best_q = -1.0;
        for (int i = 0; i < m; ++i) {
            const int ia = ring[static_cast<std::size_t>((i + m - 1) % m)];
            const int ib = ring[static_cast<std::size_t>(i)];
            const int ic = ring[static_cast<std::size_t>((i + 1) % m)];
            const Vec2 A = pts[static_cast<std::size_t>(ia)], B = pts[static_cast<std::size_t>(ib)],
                       C = pts[static_cast<std::size_t>(ic)];
            const double cross = (B - A).cross(C - A);
            if (cross <= 1e-14 * (B - A).norm() * (C - A).norm()) continue;  // reflex or flat
            bool ok = true;
            for (int j = 0; j < m && ok; ++j) {
                const int p = ring[static_cast<std::size_t>(j)];
                if (p == ia || p == ib || p == ic) continue;
                if (in_triangle(ia, ib, ic, p)) ok = false;
            }
            if (!ok) continue;
            const double q = tri_min_angle(ia, ib, ic);
            if (q > best_q) {
                best_q = q;
                best = i;
            }
        }
        if (best < 0) throw MeshError("ear clipping failed (non-simple boundary polyline?)");
        const int m2 = static_cast<int>(ring.size());
        const int ia = ring[static_cast<std::size_t>((best + m2 - 1) % m2)];
        const int ib = ring[static_cast<std::size_t>(best)];
        const int ic = ring[static_cast<std::size_t>((best + 1) % m2)];
        tris.push_back({ia, ib, ic});
        ring.erase(ring.begin() + best);
    }
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

/// Area-weighted Laplacian smoothing of interior nodes with per-node rollback
/// on inversion. Boundary nodes are never moved.
inline void smooth_interior(Mesh& mesh, int rounds) {
    const double area_floor = 1e-14 * mesh.domain_diameter * mesh.domain_diameter;
    for (int round = 0; round < rounds; ++round) {
        std::vector<std::vector<int>> node_tris(static_cast<std::size_t>(mesh.node_count()));
        for (int t = 0; t < mesh.triangle_count(); ++t)
            for (int k = 0; k < 3; ++k)
                node_tris[static_cast<std::size_t>(
                              mesh.triangles[static_cast<std::size_t>(t)]
                                            [static_cast<std::size_t>(k)])]
                    .push_back(t);
        std::vector<Vec2> proposed = mesh.nodes;
        for (int n = 0; n < mesh.node_count(); ++n) {
            if (mesh.is_boundary_node(n)) continue;
            double wsum = 0.0;
            Vec2 acc{0.0, 0.0};
            for (int t : node_tris[static_cast<std::size_t>(n)]) {
                const double w = mesh.triangle_area(t);
                acc += w * mesh.centroid(t);
                wsum += w;
            }
            if (wsum > 0.0) proposed[static_cast<std::size_t>(n)] = acc / wsum;
        }
        for (int n = 0; n < mesh.node_count(); ++n) {
            if (mesh.is_boundary_node(n)) continue;
            const Vec2 old = mesh.nodes[static_cast<std::size_t>(n)];
            mesh.nodes[static_cast<std::size_t>(n)] = proposed[static_cast<std::size_t>(n)];
            for (int t : node_tris[static_cast<std::size_t>(n)]) {
                if (mesh.triangle_area(t) <= area_floor) {
                    mesh.nodes[static_cast<std::size_t>(n)] = old;
                    break;
                }
            }
        }
    }
}

/// Deterministic Lawson sweeps: flip an interior edge whenever the flipped
/// pair of triangles has a strictly better worst angle. Boundary edges and
/// node positions are untouched.
inline void flip_interior_edges(Mesh& mesh) {
    std::set<EdgeKey> boundary;
    for (const BoundaryEdge& e : mesh.boundary_edges) boundary.insert(EdgeKey(e.a, e.b));

    const auto min_angle = [&mesh](int a, int b, int c) {
        const Vec2 P[3] = {mesh.nodes[static_cast<std::size_t>(a)],
                           mesh.nodes[static_cast<std::size_t>(b)],
                           mesh.nodes[static_cast<std::size_t>(c)]};
        double m = M_PI;
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = P[(k + 1) % 3] - P[k], v = P[(k + 2) % 3] - P[k];
            m = std::min(m, std::atan2(std::abs(u.cross(v)), u.dot(v)));
        }
        return m;
    };
    const auto area2 = [&mesh](int a, int b, int c) {
        return (mesh.nodes[static_cast<std::size_t>(b)] - mesh.nodes[static_cast<std::size_t>(a)])
            .cross(mesh.nodes[static_cast<std::size_t>(c)] -
                   mesh.nodes[static_cast<std::size_t>(a)]);
    };

    for (int sweep = 0; sweep < 40; ++sweep) {
        // edge -> (triangle, opposite node)
        std::map<EdgeKey, std::vector<std::pair<int, int>>> inc;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
            for (int e = 0; e < 3; ++e)
                inc[EdgeKey(tri[static_cast<std::size_t>(e)],
                            tri[static_cast<std::size_t>((e + 1) % 3)])]
                    .push_back({t, tri[static_cast<std::size_t>((e + 2) % 3)]});
        }
        std::vector<bool> touched(static_cast<std::size_t>(mesh.triangle_count()), false);
        int flips = 0;
        for (const auto& [key, ts] : inc) {
            if (ts.size() != 2 || boundary.count(key)) continue;
            const auto [t1, c] = ts[0];
            const auto [t2, d] = ts[1];
            if (touched[static_cast<std::size_t>(t1)] || touched[static_cast<std::size_t>(t2)])
                continue;
            const int a = key.a, b = key.b;
            const double cur = std::min(min_angle(a, b, c), min_angle(a, b, d));
            const double alt = std::min(min_angle(c, d, a), min_angle(c, d, b));
            if (!(alt > cur + 1e-12)) continue;
            // left/right of a->b; the flip is valid only for a convex quad,
            // in which case both new triangles below are positively oriented
            const int left = area2(a, b, c) > 0.0 ? c : d;
            const int right = left == c ? d : c;
            const std::array<int, 3> n1{a, right, left}, n2{b, left, right};
            const double scale = 1e-14 * mesh.domain_diameter * mesh.domain_diameter;
            if (area2(n1[0], n1[1], n1[2]) <= scale || area2(n2[0], n2[1], n2[2]) <= scale)
                continue;
            mesh.triangles[static_cast<std::size_t>(t1)] = n1;
            mesh.triangles[static_cast<std::size_t>(t2)] = n2;
            touched[static_cast<std::size_t>(t1)] = true;
            touched[static_cast<std::size_t>(t2)] = true;
            ++flips;
        }
        if (flips == 0) break;
    }
}

} // namespace detail

/// Triangulates the domain so that every edge is at most target_h long.
/// The boundary is sampled coarsely (arc endpoints always become nodes), the
/// polygon is ear-clipped, then uniformly refined with boundary midpoints
/// projected back onto their source arcs, and finally interior nodes are
/// smoothed by 10 rounds of area-weighted Laplacian smoothing.
inline Mesh triangulate(const DomainSpec& domain, double target_h) {
    if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
    const double diam = domain.diameter();
    int levels = 0;
    while (diam / std::pow(2.0, levels) > target_h && levels < 14) ++levels;
    const double h0 = target_h * std::pow(2.0, levels);

    Mesh mesh;
    mesh.domain_diameter = diam;

    // --- initial boundary chain -------------------------------------------
    struct ChainEdge {
        int a, b, arc;
        double t0, t1;
    };
    std::vector<ChainEdge> chain;
    int first_node = -1;
    int prev_node = -1;
    for (int ai = 0; ai < domain.arc_count(); ++ai) {
        const Arc& arc = domain.arc(ai);
        int n_edges = std::max(1, static_cast<int>(std::ceil(arc.length() / h0)));
        // resolve curvature: limit the tangent turn per initial edge
        double turn = 0.0;
        Vec2 prev_tau = arc.frame(0.0).tangent;
        for (int s = 1; s <= 32; ++s) {
            const Vec2 tau = arc.frame(s / 32.0).tangent;
            turn += std::abs(std::atan2(prev_tau.cross(tau), prev_tau.dot(tau)));
            prev_tau = tau;
        }
        n_edges = std::max(n_edges, static_cast<int>(std::ceil(turn / (M_PI / 4.0) - 1e-9)));

        int start;
        if (ai == 0) {
            start = mesh.node_count();
            mesh.nodes.push_back(arc.point(0.0));
            first_node = start;
        } else {
            start = prev_node;
        }
        mesh.node_boundary_info[start].push_back({ai, 0.0});

        double t_prev = 0.0;
        int n_prev = start;
        for (int e = 1; e <= n_edges; ++e) {
            const double s = arc.length() * e / n_edges;
            const double t = (e == n_edges) ? 1.0 : arc.param_at_arclength(s);
            int node;
            if (e == n_edges && ai == domain.arc_count() - 1) {
                node = first_node;
            } else {
                node = mesh.node_count();
                mesh.nodes.push_back(arc.point(t));
            }
            if (!(e == n_edges && ai == domain.arc_count() - 1))
                mesh.node_boundary_info[node].push_back({ai, t});
            else
                mesh.node_boundary_info[node].push_back({ai, 1.0});
            chain.push_back({n_prev, node, ai, t_prev, t});
            t_prev = t;
            n_prev = node;
        }
        prev_node = n_prev;
    }

    // --- ear clip ----------------------------------------------------------
    {
        std::vector<Vec2> poly(mesh.nodes.begin(), mesh.nodes.end());
        try {
            mesh.triangles = detail::ear_clip(poly);
        } catch (const MeshError& e) {
            throw MeshError(std::string("initial triangulation failed: ") + e.what());
        }
    }
    for (const ChainEdge& e : chain)
        mesh.boundary_edges.push_back(
            {e.a, e.b, e.arc, e.t0, e.t1, domain.arc(e.arc).label()});

    // --- uniform refinement with boundary projection ------------------------
    const auto refine_once = [&mesh, &domain]() {
        std::map<detail::EdgeKey, int> midpoint;
        std::map<detail::EdgeKey, std::size_t> boundary_lookup;
        for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
            boundary_lookup[detail::EdgeKey(mesh.boundary_edges[i].a, mesh.boundary_edges[i].b)] = i;

        std::vector<BoundaryEdge> new_boundary;
        const auto mid_node = [&](int u, int v) {
            const detail::EdgeKey key(u, v);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int node = mesh.node_count();
            auto bit = boundary_lookup.find(key);
            if (bit != boundary_lookup.end()) {
                const BoundaryEdge& be = mesh.boundary_edges[bit->second];
                const Arc& arc = domain.arc(be.arc);
                const double sm =
                    0.5 * (arc.arclength_at(be.t0) + arc.arclength_at(be.t1));
                const double tm = arc.param_at_arclength(sm);
                mesh.nodes.push_back(arc.point(tm));
                mesh.node_boundary_info[node].push_back({be.arc, tm});
                new_boundary.push_back({be.a, node, be.arc, be.t0, tm, be.label});
                new_boundary.push_back({node, be.b, be.arc, tm, be.t1, be.label});
            } else {
                mesh.nodes.push_back(0.5 * (mesh.nodes[static_cast<std::size_t>(u)] +
                                            mesh.nodes[static_cast<std::size_t>(v)]));
            }
            midpoint[key] = node;
            return node;
        };

        std::vector<std::array<int, 3>> new_tris;
        new_tris.reserve(mesh.triangles.size() * 4);
        for (const auto& tri : mesh.triangles) {
            const int a = tri[0], b = tri[1], c = tri[2];
            const int ab = mid_node(a, b), bc = mid_node(b, c), ca = mid_node(c, a);
            new_tris.push_back({a, ab, ca});
            new_tris.push_back({b, bc, ab});
            new_tris.push_back({c, ca, bc});
            new_tris.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(new_tris);
        mesh.boundary_edges = std::move(new_boundary);
    };

    // each level is refined and then repaired (flips + smoothing) so that
    // projection distortion never compounds across scales
    const auto quality_pass = [&mesh](int rounds) {
        detail::flip_interior_edges(mesh);
        detail::smooth_interior(mesh, rounds);
        detail::flip_interior_edges(mesh);
    };
    for (int lvl = 0; lvl < levels + 2 && mesh.max_edge_length() > target_h; ++lvl) {
        refine_once();
        quality_pass(2);
    }

    // final quality pass: the remaining smoothing rounds with interleaved
    // flips; smoothing may stretch an interior edge past the target, in which
    // case one more refinement restores the bound
    detail::smooth_interior(mesh, 4);
    detail::flip_interior_edges(mesh);
    detail::smooth_interior(mesh, 4);
    detail::flip_interior_edges(mesh);
    if (mesh.max_edge_length() > target_h) {
        refine_once();
        quality_pass(2);
    }

    validate(mesh);
    return mesh;
}

} // namespace mixlap
