#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mixlap/eigensolver.hpp"
#include "mixlap/fem_common.hpp"
#include "mixlap/geometry.hpp"
#include "mixlap/mesh.hpp"

namespace mixlap {

enum class DirichletPart { Gamma, GammaC, All };

inline const char* to_string(DirichletPart p) {
    switch (p) {
    case DirichletPart::Gamma: return "gamma";
    case DirichletPart::GammaC: return "gammac";
    case DirichletPart::All: return "all";
    }
    return "?";
}

/// Nodes on the closure of the Dirichlet part (transition corners included).
inline std::vector<bool> dirichlet_node_mask(const Mesh& mesh, DirichletPart part) {
    std::vector<bool> mask(static_cast<std::size_t>(mesh.node_count()), false);
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        const bool on = part == DirichletPart::All ||
                        (part == DirichletPart::Gamma && e.label == BoundaryLabel::Gamma) ||
                        (part == DirichletPart::GammaC && e.label == BoundaryLabel::GammaC);
        if (on) {
            mask[static_cast<std::size_t>(e.a)] = true;
            mask[static_cast<std::size_t>(e.b)] = true;
        }
    }
    return mask;
}

namespace fem {

/// Full P1 stiffness and mass (no boundary conditions), assembled from the
/// exact per-triangle formulas. The mass is consistent by default; lumping
/// (area/3 per vertex) is the documented fallback.
inline std::pair<SpMat, SpMat> assemble_p1_full(const Mesh& mesh, bool lumped_mass = false) {
    const int n = mesh.node_count();
    std::vector<Triplet> kt, mt;
    kt.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    mt.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = triangle_geometry(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            if (lumped_mass)
                mt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(i)],
                                geo.area / 3.0);
            for (int j = 0; j < 3; ++j) {
                const double kij = (geo.b[static_cast<std::size_t>(i)] * geo.b[static_cast<std::size_t>(j)] +
                                    geo.c[static_cast<std::size_t>(i)] * geo.c[static_cast<std::size_t>(j)]) /
                                   (4.0 * geo.area);
                kt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], kij);
                if (!lumped_mass) {
                    const double mij = geo.area / 12.0 * (i == j ? 2.0 : 1.0);
                    mt.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                                    mij);
                }
            }
        }
    }
    SpMat K(n, n), M(n, n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());
    return {std::move(K), std::move(M)};
}

inline void check_mass_positive(const SpMat& mass, const char* what) {
    for (int i = 0; i < mass.outerSize(); ++i)
        if (!(mass.coeff(i, i) > 0.0))
            throw SolverError(std::string(what) + ": mass matrix has a non-positive diagonal");
}

} // namespace fem

/// P1 stiffness and consistent mass with the Dirichlet nodes eliminated.
/// Set lumped_mass for the diagonal-mass fallback.
inline FormMatrices assemble_scalar(const Mesh& mesh, DirichletPart part,
                                    bool lumped_mass = false) {
    const std::vector<bool> dirichlet = dirichlet_node_mask(mesh, part);
    const int n = mesh.node_count();
    std::vector<int> to_free(static_cast<std::size_t>(n), -1);
    int n_free = 0;
    for (int i = 0; i < n; ++i)
        if (!dirichlet[static_cast<std::size_t>(i)]) to_free[static_cast<std::size_t>(i)] = n_free++;
    if (n_free == n)
        throw MeshError("scalar assembly: no Dirichlet node (the problem would contain constants)");
    if (n_free == 0) throw MeshError("scalar assembly: every node is constrained");

    auto [K_full, M_full] = fem::assemble_p1_full(mesh, lumped_mass);
    std::vector<Triplet> pt;
    for (int i = 0; i < n; ++i)
        if (to_free[static_cast<std::size_t>(i)] >= 0)
            pt.emplace_back(i, to_free[static_cast<std::size_t>(i)], 1.0);
    FormMatrices fm;
    fm.prolongation.resize(n, n_free);
    fm.prolongation.setFromTriplets(pt.begin(), pt.end());
    fm.stiffness = SpMat(fm.prolongation.transpose()) * K_full * fm.prolongation;
    fm.mass = SpMat(fm.prolongation.transpose()) * M_full * fm.prolongation;
    fem::check_symmetry(fm.stiffness, "scalar stiffness");
    fem::check_symmetry(fm.mass, "scalar mass");
    fem::check_mass_positive(fm.mass, "scalar assembly");
    return fm;
}

struct ScalarEigenResult {
    DirichletPart dirichlet_part = DirichletPart::GammaC;
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenfunctions;  ///< full nodal coefficients, one column per pair
    std::vector<double> residuals;
    int iterations = 0;
    const Mesh* mesh = nullptr;      ///< non-owning
};

/// The k smallest eigenpairs. Eigenfunctions are unit L2 norm with respect to
/// the consistent mass and sign-fixed so the first nonzero coefficient is
/// positive. Throws SolverError with a kernel hint when K cannot be factored.
inline ScalarEigenResult solve_smallest_scalar(const Mesh& mesh, const FormMatrices& fm, int k,
                                               const EigenOptions& base_opt = {}) {
    EigenOptions opt = base_opt;
    opt.k = k;
    EigenPairs pairs;
    try {
        pairs = solve_smallest(fm.stiffness, fm.mass, opt);
    } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) +
                          " [kernel present? use the constrained vector solver for H_c]");
    }

    ScalarEigenResult res;
    res.eigenvalues = pairs.values;
    res.residuals = pairs.residuals;
    res.iterations = pairs.iterations;
    res.mesh = &mesh;
    res.eigenfunctions.resize(fm.full_dofs(), k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd v = pairs.vectors.col(j);
        const double nrm = std::sqrt(v.dot(fm.mass * v));
        v /= nrm;
        Eigen::VectorXd full = fm.prolongation * v;
        const double scale = full.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < full.size(); ++i) {
            if (std::abs(full[i]) > 1e-12 * scale) {
                if (full[i] < 0.0) full = -full;
                break;
            }
        }
        res.eigenfunctions.col(j) = full;
    }
    return res;
}

/// Exact gradient of a P1 nodal function, constant per triangle.
inline std::vector<Vec2> gradient_field(const Mesh& mesh, const Eigen::VectorXd& nodal) {
    if (nodal.size() != mesh.node_count())
        throw SolverError("gradient_field: coefficient vector size mismatch");
    std::vector<Vec2> g(static_cast<std::size_t>(mesh.triangle_count()));
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = fem::triangle_geometry(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        Vec2 acc{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const double u = nodal[tri[static_cast<std::size_t>(i)]];
            acc += u * Vec2{geo.b[static_cast<std::size_t>(i)], geo.c[static_cast<std::size_t>(i)]};
        }
        g[static_cast<std::size_t>(t)] = acc / (2.0 * geo.area);
    }
    return g;
}

struct MonotonicityReport {
    double min_dx = 0.0;
    double min_dy = 0.0;
    double threshold = 0.0;               ///< 1e-6 * max gradient magnitude
    std::vector<int> offending_triangles;  ///< some component below -threshold
};

inline MonotonicityReport monotonicity_report(const std::vector<Vec2>& grad) {
    MonotonicityReport rep;
    if (grad.empty()) return rep;
    rep.min_dx = grad.front().x;
    rep.min_dy = grad.front().y;
    double max_mag = 0.0;
    for (const Vec2& g : grad) {
        rep.min_dx = std::min(rep.min_dx, g.x);
        rep.min_dy = std::min(rep.min_dy, g.y);
        max_mag = std::max(max_mag, g.norm());
    }
    rep.threshold = 1e-6 * max_mag;
    for (std::size_t t = 0; t < grad.size(); ++t)
        if (grad[t].x < -rep.threshold || grad[t].y < -rep.threshold)
            rep.offending_triangles.push_back(static_cast<int>(t));
    return rep;
}

struct HotspotReport {
    int argmax_node = -1;
    Vec2 argmax_point;
    double max_value = 0.0;
    bool on_gamma = false;
    std::optional<Vec2> corner_p;
    std::optional<double> distance_to_p;
};

/// Location of the maximum of the first eigenfunction relative to the
/// predicted corner (when one exists).
inline HotspotReport hotspot_report(const Mesh& mesh, const DomainSpec& domain,
                                    const Eigen::VectorXd& psi1) {
    if (psi1.size() != mesh.node_count())
        throw SolverError("hotspot_report: coefficient vector size mismatch");
    HotspotReport rep;
    // make the comparison sign-independent: the first eigenfunction has one
    // sign; flip so its extremum is a maximum
    Eigen::VectorXd v = psi1;
    if (std::abs(v.minCoeff()) > std::abs(v.maxCoeff())) v = -v;
    Eigen::Index arg = 0;
    rep.max_value = v.maxCoeff(&arg);
    rep.argmax_node = static_cast<int>(arg);
    rep.argmax_point = mesh.nodes[static_cast<std::size_t>(rep.argmax_node)];
    rep.on_gamma = mesh.node_on_label(rep.argmax_node, BoundaryLabel::Gamma);
    rep.corner_p = hotspot_corner(domain);
    if (rep.corner_p)
        rep.distance_to_p = distance(rep.argmax_point, *rep.corner_p);
    return rep;
}

} // namespace mixlap
