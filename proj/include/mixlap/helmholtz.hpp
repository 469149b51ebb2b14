#pragma once

#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

#include "mixlap/fem_common.hpp"
#include "mixlap/scalar_fem.hpp"
#include "mixlap/vector_fem.hpp"

namespace mixlap {

/// Orthogonal splitting of a per-triangle constant field into a gradient from
/// the Dirichlet-part potential space, a perpendicular gradient from the dual
/// space, and the leftover (discrete harmonic-like) part.
struct DecompositionResult {
    Eigen::VectorXd psi;             ///< full nodal potential, zero on the Dirichlet part
    Eigen::VectorXd phi;             ///< full nodal potential, zero on the Neumann part
    std::vector<Vec2> grad_psi;      ///< per triangle
    std::vector<Vec2> perp_grad_phi; ///< per triangle
    std::vector<Vec2> residual;      ///< input - grad_psi - perp_grad_phi
    double norm_input = 0.0;
    double norm_grad_psi = 0.0;
    double norm_perp_grad_phi = 0.0;
    double norm_residual = 0.0;
};

namespace detail {

inline double p0_norm(const Mesh& mesh, const std::vector<Vec2>& f) {
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        s += mesh.triangle_area(t) * f[static_cast<std::size_t>(t)].squared_norm();
    return std::sqrt(s);
}

/// Right-hand side <u, grad chi_i> over the free nodes of the given space.
inline Eigen::VectorXd gradient_rhs(const Mesh& mesh, const FormMatrices& fm,
                                    const std::vector<Vec2>& u, bool perp) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.node_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = fem::triangle_geometry(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const Vec2 ut = u[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            Vec2 g{geo.b[static_cast<std::size_t>(i)] / 2.0, geo.c[static_cast<std::size_t>(i)] / 2.0};
            if (perp) g = g.perp();
            full[tri[static_cast<std::size_t>(i)]] += ut.dot(g);
        }
    }
    return SpMat(fm.prolongation.transpose()) * full;
}

} // namespace detail

/// Galerkin normal equations for both potentials, solved with a direct sparse
/// factorization; the residual makes the reconstruction exact per triangle.
inline DecompositionResult decompose(const std::vector<Vec2>& field, const Mesh& mesh,
                                     const DomainSpec& domain) {
    (void)domain;
    if (field.size() != static_cast<std::size_t>(mesh.triangle_count()))
        throw SolverError("decompose: field must carry one vector per triangle");

    FormMatrices gc, g;
    try {
        gc = assemble_scalar(mesh, DirichletPart::GammaC);
        g = assemble_scalar(mesh, DirichletPart::Gamma);
    } catch (const MeshError& e) {
        throw SolverError(std::string("decompose: empty Dirichlet node set: ") + e.what());
    }

    const auto solve_potential = [&mesh](const FormMatrices& fm, const Eigen::VectorXd& rhs) {
        Eigen::SimplicialLDLT<SpMat> chol(fm.stiffness);
        if (chol.info() != Eigen::Success)
            throw SolverError("decompose: potential solve failed");
        const Eigen::VectorXd reduced = chol.solve(rhs);
        return Eigen::VectorXd(fm.prolongation * reduced);
    };

    DecompositionResult res;
    res.psi = solve_potential(gc, detail::gradient_rhs(mesh, gc, field, false));
    res.phi = solve_potential(g, detail::gradient_rhs(mesh, g, field, true));
    res.grad_psi = gradient_field(mesh, res.psi);
    res.perp_grad_phi = gradient_field(mesh, res.phi);
    for (Vec2& v : res.perp_grad_phi) v = v.perp();
    res.residual.resize(field.size());
    for (std::size_t t = 0; t < field.size(); ++t)
        res.residual[t] = field[t] - res.grad_psi[t] - res.perp_grad_phi[t];
    res.norm_input = detail::p0_norm(mesh, field);
    res.norm_grad_psi = detail::p0_norm(mesh, res.grad_psi);
    res.norm_perp_grad_phi = detail::p0_norm(mesh, res.perp_grad_phi);
    res.norm_residual = detail::p0_norm(mesh, res.residual);
    return res;
}

/// Largest entry of the cross-Gram matrix between the gradients of the
/// Dirichlet-part basis and the perpendicular gradients of the dual basis,
/// relative to the stiffness scale. Elementwise integration by parts
/// telescopes, so this vanishes in exact arithmetic on any conforming mesh.
inline double exact_discrete_orthogonality_check(const Mesh& mesh, const DomainSpec& domain) {
    (void)domain;
    const FormMatrices gc = assemble_scalar(mesh, DirichletPart::GammaC);
    const FormMatrices g = assemble_scalar(mesh, DirichletPart::Gamma);

    // C_ij = sum_T A (grad chi_i) . perp(grad xi_j), chi in the GammaC space,
    // xi in the Gamma space
    std::vector<Triplet> ct;
    ct.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    std::vector<int> to_gc(static_cast<std::size_t>(mesh.node_count()), -1);
    std::vector<int> to_g(static_cast<std::size_t>(mesh.node_count()), -1);
    for (int k = 0; k < gc.prolongation.outerSize(); ++k)
        for (SpMat::InnerIterator it(gc.prolongation, k); it; ++it)
            to_gc[static_cast<std::size_t>(it.row())] = static_cast<int>(it.col());
    for (int k = 0; k < g.prolongation.outerSize(); ++k)
        for (SpMat::InnerIterator it(g.prolongation, k); it; ++it)
            to_g[static_cast<std::size_t>(it.row())] = static_cast<int>(it.col());

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = fem::triangle_geometry(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            const int gi = to_gc[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
            if (gi < 0) continue;
            const Vec2 grad_i{geo.b[static_cast<std::size_t>(i)], geo.c[static_cast<std::size_t>(i)]};
            for (int j = 0; j < 3; ++j) {
                const int gj = to_g[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
                if (gj < 0) continue;
                const Vec2 grad_j{geo.b[static_cast<std::size_t>(j)], geo.c[static_cast<std::size_t>(j)]};
                ct.emplace_back(gi, gj, grad_i.dot(grad_j.perp()) / (4.0 * geo.area));
            }
        }
    }
    SpMat C(gc.reduced_dofs(), g.reduced_dofs());
    C.setFromTriplets(ct.begin(), ct.end());

    double cmax = 0.0;
    for (int k = 0; k < C.outerSize(); ++k)
        for (SpMat::InnerIterator it(C, k); it; ++it) cmax = std::max(cmax, std::abs(it.value()));
    double kscale = 0.0;
    for (int k = 0; k < gc.stiffness.outerSize(); ++k)
        for (SpMat::InnerIterator it(gc.stiffness, k); it; ++it)
            kscale = std::max(kscale, std::abs(it.value()));
    for (int k = 0; k < g.stiffness.outerSize(); ++k)
        for (SpMat::InnerIterator it(g.stiffness, k); it; ++it)
            kscale = std::max(kscale, std::abs(it.value()));
    return cmax / std::max(kscale, 1e-300);
}

/// Dimension of the discrete harmonic-like space, read off the near-zero
/// eigenvalue count of the constrained curvature-form eigenproblem.
inline int estimate_hc_dim(const Mesh& mesh, const DomainSpec& domain, double tol_kernel = 1e-8) {
    const ConstraintMap cm = build_constraints(mesh, domain);
    const FormMatrices fm = assemble_curvature(mesh, cm, domain);
    const int k = std::min<int>(4, static_cast<int>(fm.reduced_dofs()));
    const VectorEigenResult r = solve_vector_evp(fm, k, tol_kernel);
    return r.kernel_dim;
}

} // namespace mixlap
