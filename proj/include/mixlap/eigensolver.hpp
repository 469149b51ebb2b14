#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "mixlap/errors.hpp"
#include "mixlap/fem_common.hpp"

namespace mixlap {

struct EigenOptions {
    int k = 1;
    double tol = 1e-10;          ///< relative residual |Kv - t Mv| / ((1+|t|)|Mv|)
    double residual_cap = 1e-8;  ///< additionally require |Kv - t Mv| / |Mv| below this
    int max_iterations = 500;
    unsigned seed = 20240531u;
    double shift = 0.0;          ///< factorize K + shift*M
    int block = 0;               ///< 0 = automatic (k plus guard vectors)
};

struct EigenPairs {
    std::vector<double> values;      ///< k smallest, ascending
    Eigen::MatrixXd vectors;         ///< reduced coefficients, one column per pair
    std::vector<double> residuals;   ///< |Kv - t Mv| / |Mv| per pair
    int iterations = 0;
};

namespace detail {

/// M-orthonormalize the columns of V in place (modified Gram-Schmidt, two
/// passes). Columns that collapse are replaced from the deterministic RNG.
inline void m_orthonormalize(Eigen::MatrixXd& V, const SpMat& M, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        for (int attempt = 0; attempt < 3; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i < j; ++i) {
                    const double proj = V.col(i).dot(M * V.col(j));
                    V.col(j) -= proj * V.col(i);
                }
            }
            const double nrm = std::sqrt(V.col(j).dot(M * V.col(j)));
            if (nrm > 1e-14) {
                V.col(j) /= nrm;
                break;
            }
            for (Eigen::Index r = 0; r < V.rows(); ++r) V(r, j) = dist(rng);
        }
    }
}

} // namespace detail

/// Smallest generalized eigenpairs of K v = t M v for sparse symmetric K and
/// positive definite M. Shift-inverted block subspace iteration with
/// Rayleigh-Ritz extraction: the factorization of K + shift*M is applied to
/// M V each step, the Ritz values are re-sorted ascending, and convergence is
/// declared once the first k relative residuals drop below tol.
inline EigenPairs solve_smallest(const SpMat& K, const SpMat& M, const EigenOptions& opt) {
    const Eigen::Index n = K.rows();
    if (opt.k < 1) throw SolverError("eigensolver: k must be >= 1");
    if (static_cast<Eigen::Index>(opt.k) > n)
        throw SolverError("eigensolver: k exceeds the number of free DOFs");

    SpMat A = K;
    if (opt.shift != 0.0) A = K + opt.shift * M;
    Eigen::SimplicialLDLT<SpMat> factor(A);
    if (factor.info() != Eigen::Success)
        throw SolverError("eigensolver: sparse factorization failed (singular stiffness?)");
    {
        const auto& D = factor.vectorD();
        double dmax = 0.0;
        for (Eigen::Index i = 0; i < D.size(); ++i) dmax = std::max(dmax, std::abs(D[i]));
        for (Eigen::Index i = 0; i < D.size(); ++i)
            if (!(D[i] > -1e-10 * dmax))
                throw SolverError("eigensolver: stiffness matrix is numerically indefinite");
        for (Eigen::Index i = 0; i < D.size(); ++i)
            if (D[i] == 0.0)
                throw SolverError("eigensolver: exactly singular stiffness matrix");
    }

    const int block =
        opt.block > 0 ? std::min<Eigen::Index>(opt.block, n)
                      : std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.k) + 4 +
                                                   static_cast<Eigen::Index>(opt.k) / 2,
                                               n);

    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd V(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
        for (Eigen::Index i = 0; i < n; ++i) V(i, j) = dist(rng);
    detail::m_orthonormalize(V, M, rng);

    EigenPairs out;
    Eigen::VectorXd theta(block);
    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        Eigen::MatrixXd W = factor.solve(M * V);
        detail::m_orthonormalize(W, M, rng);
        Eigen::MatrixXd H = W.transpose() * (K * W);
        H = 0.5 * (H + H.transpose()).eval();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
        if (ritz.info() != Eigen::Success)
            throw SolverError("eigensolver: dense Rayleigh-Ritz step failed");
        V = W * ritz.eigenvectors();
        theta = ritz.eigenvalues();

        bool done = true;
        out.residuals.assign(static_cast<std::size_t>(opt.k), 0.0);
        for (int j = 0; j < opt.k; ++j) {
            const Eigen::VectorXd r = K * V.col(j) - theta[j] * (M * V.col(j));
            const double mn = (M * V.col(j)).norm();
            const double res = r.norm() / mn;
            out.residuals[static_cast<std::size_t>(j)] = res;
            if (res > opt.tol * (1.0 + std::abs(theta[j])) || res > opt.residual_cap)
                done = false;
        }
        out.iterations = iter;
        if (done) break;
        if (iter == opt.max_iterations)
            throw SolverError("eigensolver: no convergence within iteration budget");
    }

    out.values.assign(theta.data(), theta.data() + opt.k);
    out.vectors = V.leftCols(opt.k);
    return out;
}

} // namespace mixlap
