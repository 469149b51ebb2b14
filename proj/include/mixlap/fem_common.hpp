#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mixlap/errors.hpp"
#include "mixlap/mesh.hpp"

namespace mixlap {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Reduced stiffness/mass pair together with the prolongation from reduced
/// degrees of freedom to the full nodal vector. The prolongation columns are
/// orthonormal (plain selection for scalar problems, per-node kept directions
/// for constrained vector problems).
struct FormMatrices {
    SpMat stiffness;
    SpMat mass;
    SpMat prolongation;

    Eigen::Index reduced_dofs() const { return stiffness.rows(); }
    Eigen::Index full_dofs() const { return prolongation.rows(); }
};

namespace fem {

/// P1 gradient data of one triangle: grad lambda_i = (b_i, c_i) / (2A).
struct TriangleGeometry {
    std::array<double, 3> b;
    std::array<double, 3> c;
    double area;
};

inline TriangleGeometry triangle_geometry(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Vec2 p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Vec2 p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
    TriangleGeometry g;
    g.b = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    g.c = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    g.area = 0.5 * (p1 - p0).cross(p2 - p0);
    return g;
}

inline void check_symmetry(const SpMat& m, const char* what) {
    const SpMat diff = SpMat(m.transpose()) - m;
    double scale = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    if (worst > 1e-14 * std::max(scale, 1.0))
        throw SolverError(std::string(what) + ": assembled matrix is not symmetric");
}

} // namespace fem
} // namespace mixlap
