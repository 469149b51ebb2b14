#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mixlap/eigensolver.hpp"
#include "mixlap/fem_common.hpp"
#include "mixlap/geometry.hpp"
#include "mixlap/mesh.hpp"
#include "mixlap/scalar_fem.hpp"

namespace mixlap {

enum class ConstraintKind : std::uint8_t { Free, OneDirection, Pinned };

struct NodeConstraint {
    ConstraintKind kind = ConstraintKind::Free;
    Vec2 direction;  ///< kept direction for OneDirection nodes
};

/// Nodal constraints realizing u.nu = 0 on the Neumann part and u.tau = 0 on
/// the Dirichlet part, with nodes carrying two independent constraint
/// directions pinned to zero. The prolongation maps reduced DOFs to the full
/// 2-per-node vector and has orthonormal columns.
struct ConstraintMap {
    std::vector<NodeConstraint> nodes;
    SpMat prolongation;

    Eigen::Index reduced_dofs() const { return prolongation.cols(); }
};

/// Canonical sign: first nonzero component positive.
inline Vec2 canonical_direction(Vec2 d) {
    d = d.normalized();
    if (d.x < -1e-12) return {-d.x, -d.y};
    if (std::abs(d.x) <= 1e-12 && d.y < 0.0) return {-d.x, -d.y};
    return d;
}

inline ConstraintMap build_constraints(const Mesh& mesh, const DomainSpec& domain) {
    ConstraintMap cm;
    cm.nodes.assign(static_cast<std::size_t>(mesh.node_count()), NodeConstraint{});

    for (const auto& [node, infos] : mesh.node_boundary_info) {
        // constrained directions contributed by each incident arc, evaluated
        // exactly at the node's parameter on that arc
        std::vector<Vec2> constrained;
        for (const BoundaryNodeInfo& bi : infos) {
            const BoundaryFrame f = domain.arc(bi.arc).frame(bi.t);
            constrained.push_back(domain.arc(bi.arc).label() == BoundaryLabel::Gamma ? f.normal
                                                                                     : f.tangent);
        }
        bool rank2 = false;
        for (std::size_t i = 0; i + 1 < constrained.size() && !rank2; ++i)
            for (std::size_t j = i + 1; j < constrained.size() && !rank2; ++j)
                if (std::abs(constrained[i].cross(constrained[j])) > 1e-10) rank2 = true;

        NodeConstraint& nc = cm.nodes[static_cast<std::size_t>(node)];
        if (rank2) {
            nc.kind = ConstraintKind::Pinned;
        } else {
            nc.kind = ConstraintKind::OneDirection;
            nc.direction = canonical_direction(constrained.front().perp());
        }
    }

    std::vector<Triplet> pt;
    int col = 0;
    for (int n = 0; n < mesh.node_count(); ++n) {
        const NodeConstraint& nc = cm.nodes[static_cast<std::size_t>(n)];
        switch (nc.kind) {
        case ConstraintKind::Free:
            pt.emplace_back(2 * n, col++, 1.0);
            pt.emplace_back(2 * n + 1, col++, 1.0);
            break;
        case ConstraintKind::OneDirection:
            pt.emplace_back(2 * n, col, nc.direction.x);
            pt.emplace_back(2 * n + 1, col, nc.direction.y);
            ++col;
            break;
        case ConstraintKind::Pinned:
            break;
        }
    }
    cm.prolongation.resize(2 * mesh.node_count(), col);
    cm.prolongation.setFromTriplets(pt.begin(), pt.end());
    return cm;
}

/// Reduced matrices of the div/vorticity form
///   a[u] = int (div u)^2 + (omega u)^2,  omega(u) = d1 u2 - d2 u1,
/// over constrained P1 vector fields, with the consistent vector mass.
inline FormMatrices assemble_divcurl(const Mesh& mesh, const ConstraintMap& constraints) {
    const int n = mesh.node_count();
    std::vector<Triplet> kt, mt;
    kt.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 36);
    mt.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 36);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = fem::triangle_geometry(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        // div u = sum_i (b_i ux_i + c_i uy_i) / 2A ; omega u = sum_i (b_i uy_i - c_i ux_i) / 2A
        double d[6], w[6];
        int dof[6];
        for (int i = 0; i < 3; ++i) {
            d[2 * i] = geo.b[static_cast<std::size_t>(i)];
            d[2 * i + 1] = geo.c[static_cast<std::size_t>(i)];
            w[2 * i] = -geo.c[static_cast<std::size_t>(i)];
            w[2 * i + 1] = geo.b[static_cast<std::size_t>(i)];
            dof[2 * i] = 2 * tri[static_cast<std::size_t>(i)];
            dof[2 * i + 1] = 2 * tri[static_cast<std::size_t>(i)] + 1;
        }
        const double inv = 1.0 / (2.0 * geo.area);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                kt.emplace_back(dof[i], dof[j],
                                geo.area * inv * inv * (d[i] * d[j] + w[i] * w[j]));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double mij = geo.area / 12.0 * (i == j ? 2.0 : 1.0);
                mt.emplace_back(2 * tri[static_cast<std::size_t>(i)], 2 * tri[static_cast<std::size_t>(j)], mij);
                mt.emplace_back(2 * tri[static_cast<std::size_t>(i)] + 1,
                                2 * tri[static_cast<std::size_t>(j)] + 1, mij);
            }
    }
    SpMat K(2 * n, 2 * n), M(2 * n, 2 * n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());
    FormMatrices fm;
    fm.prolongation = constraints.prolongation;
    fm.stiffness = SpMat(fm.prolongation.transpose()) * K * fm.prolongation;
    fm.mass = SpMat(fm.prolongation.transpose()) * M * fm.prolongation;
    fem::check_symmetry(fm.stiffness, "divcurl stiffness");
    fem::check_mass_positive(fm.mass, "divcurl assembly");
    return fm;
}

/// Reduced matrices of the curvature form
///   int |grad u1|^2 + |grad u2|^2 - int_bnd kappa |u|^2
/// with kappa evaluated at the parameter midpoint of each boundary edge
/// (2-point Gauss integrates the quadratic kappa-term exactly; straight
/// edges contribute nothing).
inline FormMatrices assemble_curvature(const Mesh& mesh, const ConstraintMap& constraints,
                                       const DomainSpec& domain) {
    const int n = mesh.node_count();
    auto [K_scalar, M_scalar] = fem::assemble_p1_full(mesh);
    std::vector<Triplet> kt, mt;
    for (int k = 0; k < K_scalar.outerSize(); ++k)
        for (SpMat::InnerIterator it(K_scalar, k); it; ++it) {
            kt.emplace_back(2 * static_cast<int>(it.row()), 2 * static_cast<int>(it.col()),
                            it.value());
            kt.emplace_back(2 * static_cast<int>(it.row()) + 1, 2 * static_cast<int>(it.col()) + 1,
                            it.value());
        }
    for (int k = 0; k < M_scalar.outerSize(); ++k)
        for (SpMat::InnerIterator it(M_scalar, k); it; ++it) {
            mt.emplace_back(2 * static_cast<int>(it.row()), 2 * static_cast<int>(it.col()),
                            it.value());
            mt.emplace_back(2 * static_cast<int>(it.row()) + 1, 2 * static_cast<int>(it.col()) + 1,
                            it.value());
        }
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        const Arc& arc = domain.arc(e.arc);
        if (arc.kind() == Arc::Kind::Segment) continue;  // kappa = 0
        const double kappa = arc.frame(0.5 * (e.t0 + e.t1)).curvature;
        if (kappa == 0.0) continue;
        const double len = distance(mesh.nodes[static_cast<std::size_t>(e.a)],
                                    mesh.nodes[static_cast<std::size_t>(e.b)]);
        const double m00 = len / 3.0, m01 = len / 6.0;
        const int na = e.a, nb = e.b;
        for (int comp = 0; comp < 2; ++comp) {
            kt.emplace_back(2 * na + comp, 2 * na + comp, -kappa * m00);
            kt.emplace_back(2 * nb + comp, 2 * nb + comp, -kappa * m00);
            kt.emplace_back(2 * na + comp, 2 * nb + comp, -kappa * m01);
            kt.emplace_back(2 * nb + comp, 2 * na + comp, -kappa * m01);
        }
    }
    SpMat K(2 * n, 2 * n), M(2 * n, 2 * n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());
    FormMatrices fm;
    fm.prolongation = constraints.prolongation;
    fm.stiffness = SpMat(fm.prolongation.transpose()) * K * fm.prolongation;
    fm.mass = SpMat(fm.prolongation.transpose()) * M * fm.prolongation;
    fem::check_symmetry(fm.stiffness, "curvature stiffness");
    fem::check_mass_positive(fm.mass, "curvature assembly");
    return fm;
}

enum class VectorForm : std::uint8_t { DivCurl, Curvature };

struct VectorEigenResult {
    std::vector<double> eigenvalues;  ///< ascending, near-zero kernel values included
    Eigen::MatrixXd reduced;          ///< reduced coefficients per pair
    Eigen::MatrixXd full;             ///< prolonged nodal fields (2 per node) per pair
    std::vector<double> residuals;
    int iterations = 0;
    int kernel_dim = 0;               ///< eigenvalues below tol_kernel * first positive
    double kernel_threshold = 0.0;
    VectorForm form = VectorForm::Curvature;
};

/// Smallest k pairs of the reduced eigenproblem. Near-zero eigenvalues
/// (below tol_kernel relative to the first clearly positive one) count as the
/// discrete harmonic-like kernel. A singular stiffness is handled by shifting
/// the factorization; eigenvalues are reported unshifted.
inline VectorEigenResult solve_vector_evp(const FormMatrices& fm, int k, double tol_kernel = 1e-8,
                                          VectorForm form = VectorForm::Curvature,
                                          const EigenOptions& base_opt = {}) {
    EigenOptions opt = base_opt;
    opt.k = k;
    double trace_k = 0.0, trace_m = 0.0;
    for (int i = 0; i < fm.stiffness.outerSize(); ++i)
        trace_k += fm.stiffness.coeff(i, i);
    for (int i = 0; i < fm.mass.outerSize(); ++i)
        trace_m += fm.mass.coeff(i, i);
    const double scale = trace_m > 0.0 ? trace_k / trace_m : 1.0;
    opt.shift = std::max(tol_kernel, 1e-12) * scale;

    const EigenPairs pairs = solve_smallest(fm.stiffness, fm.mass, opt);

    VectorEigenResult res;
    res.form = form;
    res.eigenvalues = pairs.values;
    res.residuals = pairs.residuals;
    res.iterations = pairs.iterations;
    res.reduced.resize(fm.reduced_dofs(), k);
    res.full.resize(fm.full_dofs(), k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd v = pairs.vectors.col(j);
        const double nrm = std::sqrt(v.dot(fm.mass * v));
        v /= nrm;
        Eigen::VectorXd full = fm.prolongation * v;
        const double fscale = full.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < full.size(); ++i) {
            if (std::abs(full[i]) > 1e-12 * fscale) {
                if (full[i] < 0.0) {
                    full = -full;
                    v = -v;
                }
                break;
            }
        }
        res.reduced.col(j) = v;
        res.full.col(j) = full;
    }

    const double vmax = std::abs(res.eigenvalues.back());
    double first_positive = 0.0;
    for (double t : res.eigenvalues) {
        if (t > 1e-6 * vmax) {
            first_positive = t;
            break;
        }
    }
    res.kernel_threshold = tol_kernel * first_positive;
    res.kernel_dim = 0;
    for (double t : res.eigenvalues)
        if (t < res.kernel_threshold) ++res.kernel_dim;
    if (first_positive == 0.0) res.kernel_dim = k;  // everything computed is kernel
    return res;
}

/// Per-node Vec2 view of a full DOF vector.
inline std::vector<Vec2> nodal_field(const Eigen::VectorXd& full) {
    std::vector<Vec2> f(static_cast<std::size_t>(full.size() / 2));
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = {full[2 * static_cast<Eigen::Index>(i)], full[2 * static_cast<Eigen::Index>(i) + 1]};
    return f;
}

/// Area-weighted nodal average of a per-triangle field, projected into the
/// constrained space (reduced coefficients).
inline Eigen::VectorXd interpolate_to_constrained(const Mesh& mesh, const ConstraintMap& cm,
                                                  const std::vector<Vec2>& tri_field) {
    if (tri_field.size() != static_cast<std::size_t>(mesh.triangle_count()))
        throw SolverError("interpolate_to_constrained: field size mismatch");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * mesh.node_count());
    std::vector<double> weight(static_cast<std::size_t>(mesh.node_count()), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double a = mesh.triangle_area(t);
        for (int k = 0; k < 3; ++k) {
            const int nidx = mesh.triangles[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
            full[2 * nidx] += a * tri_field[static_cast<std::size_t>(t)].x;
            full[2 * nidx + 1] += a * tri_field[static_cast<std::size_t>(t)].y;
            weight[static_cast<std::size_t>(nidx)] += a;
        }
    }
    for (int nidx = 0; nidx < mesh.node_count(); ++nidx) {
        if (weight[static_cast<std::size_t>(nidx)] > 0.0) {
            full[2 * nidx] /= weight[static_cast<std::size_t>(nidx)];
            full[2 * nidx + 1] /= weight[static_cast<std::size_t>(nidx)];
        }
    }
    // orthonormal columns: P^T realizes the per-node projection
    return SpMat(cm.prolongation.transpose()) * full;
}

struct FormComparison {
    double divcurl_value = 0.0;
    double curvature_value = 0.0;
    double relative_gap = 0.0;
};

/// Both quadratic forms evaluated on the same reduced vector.
inline FormComparison compare_forms(const Eigen::VectorXd& reduced_field,
                                    const FormMatrices& divcurl, const FormMatrices& curvature) {
    if (reduced_field.size() != divcurl.reduced_dofs() ||
        reduced_field.size() != curvature.reduced_dofs())
        throw SolverError("compare_forms: mismatched reduced spaces");
    FormComparison c;
    c.divcurl_value = reduced_field.dot(divcurl.stiffness * reduced_field);
    c.curvature_value = reduced_field.dot(curvature.stiffness * reduced_field);
    const double denom = std::max({std::abs(c.divcurl_value), std::abs(c.curvature_value), 1e-300});
    c.relative_gap = std::abs(c.divcurl_value - c.curvature_value) / denom;
    return c;
}

struct MinimizerReport {
    double eta1 = 0.0;                ///< first positive vector eigenvalue
    double lambda_gamma = 0.0;
    double lambda_gammac = 0.0;
    double cos_grad_psi = 0.0;        ///< alignment with grad(psi_1)
    double cos_perp_grad_phi = 0.0;   ///< alignment with perp-grad(phi_1)
    bool gammac_attains = false;      ///< lambda_gammac <= lambda_gamma
    bool near_degenerate = false;     ///< eta2 - eta1 < 1e-3 * eta1
};

/// Decomposes the first positive eigenfield against the two candidate
/// minimizers: the gradient of the first Dirichlet-part eigenfunction and the
/// perpendicular gradient of the first dual eigenfunction.
inline MinimizerReport identify_minimizer(const Mesh& mesh, const ConstraintMap& cm,
                                          const FormMatrices& fm, const VectorEigenResult& vec,
                                          const ScalarEigenResult& scalar_gamma,
                                          const ScalarEigenResult& scalar_gammac) {
    const int first = vec.kernel_dim;
    if (first >= static_cast<int>(vec.eigenvalues.size()))
        throw SolverError("identify_minimizer: no positive eigenvalue available");
    const Eigen::VectorXd u = vec.reduced.col(first);
    if (u.norm() == 0.0) throw SolverError("identify_minimizer: zero eigenfield");

    MinimizerReport rep;
    rep.eta1 = vec.eigenvalues[static_cast<std::size_t>(first)];
    if (first + 1 < static_cast<int>(vec.eigenvalues.size()))
        rep.near_degenerate =
            vec.eigenvalues[static_cast<std::size_t>(first) + 1] - rep.eta1 < 1e-3 * rep.eta1;
    rep.lambda_gamma = scalar_gamma.eigenvalues.front();
    rep.lambda_gammac = scalar_gammac.eigenvalues.front();
    rep.gammac_attains = rep.lambda_gammac <= rep.lambda_gamma;

    const auto cosine = [&](const Eigen::VectorXd& reduced) {
        const double nu = std::sqrt(u.dot(fm.mass * u));
        const double ng = std::sqrt(reduced.dot(fm.mass * reduced));
        if (ng == 0.0) return 0.0;
        return std::abs(u.dot(fm.mass * reduced)) / (nu * ng);
    };

    const auto grad_psi = gradient_field(mesh, scalar_gammac.eigenfunctions.col(0));
    rep.cos_grad_psi = cosine(interpolate_to_constrained(mesh, cm, grad_psi));

    auto perp_grad_phi = gradient_field(mesh, scalar_gamma.eigenfunctions.col(0));
    for (Vec2& g : perp_grad_phi) g = g.perp();
    rep.cos_perp_grad_phi = cosine(interpolate_to_constrained(mesh, cm, perp_grad_phi));
    return rep;
}

} // namespace mixlap
