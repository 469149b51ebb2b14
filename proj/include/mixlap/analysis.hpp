#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mixlap/geometry.hpp"
#include "mixlap/helmholtz.hpp"
#include "mixlap/mesh.hpp"
#include "mixlap/scalar_fem.hpp"
#include "mixlap/vector_fem.hpp"

namespace mixlap {

enum class Verdict : std::uint8_t { Confirmed, Refuted, HypothesesNotMet, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Confirmed: return "confirmed";
    case Verdict::Refuted: return "refuted";
    case Verdict::HypothesesNotMet: return "hypotheses-not-met";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct SuiteOptions {
    int k_vector = 4;
    double tol_kernel = 1e-8;
    unsigned seed = 20240531u;
};

struct LevelData {
    double h = 0.0;
    int nodes = 0;
    int triangles = 0;
    double min_angle_deg = 0.0;
    double lambda_gamma = 0.0;
    double lambda_gammac = 0.0;
    double eta1 = 0.0;
    double union_mismatch = 0.0;  ///< |eta1 - min(lambdas)| / min(lambdas)
    double form_gap = 0.0;        ///< div-curl vs curvature on the first eigenfield
    int kernel_dim = 0;
    MonotonicityReport monotonicity;
    HotspotReport hotspot;
    MinimizerReport minimizer;
};

struct TheoremReport {
    std::string domain_id;
    bool rotation_found = false;
    double rotation = 0.0;
    HypothesisReport hypotheses;
    std::vector<LevelData> levels;
    double lambda_gamma_extrapolated = 0.0;
    double lambda_gammac_extrapolated = 0.0;
    double observed_rate = 2.0;
    double inequality_margin = 0.0;  ///< extrapolated lambda_gamma - lambda_gammac
    double drift = 0.0;              ///< finest level-to-level eigenvalue change
    Verdict inequality = Verdict::Inconclusive;
    Verdict spectral_union = Verdict::Inconclusive;
    Verdict monotonicity = Verdict::Inconclusive;
    Verdict hotspot = Verdict::Inconclusive;
    std::string error;  ///< non-empty when a sub-solve failed
};

namespace detail {

inline double richardson(double coarse, double fine, double ratio, double rate) {
    return fine + (fine - coarse) / (std::pow(ratio, rate) - 1.0);
}

} // namespace detail

/// Runs the hypothesis check (after an automatic rotation search), both
/// scalar eigensolves, the constrained vector eigensolve and the derived
/// reports on each refinement level, then extrapolates and issues verdicts.
inline TheoremReport run_theorem_suite(const DomainSpec& domain, std::vector<double> h_levels,
                                       const SuiteOptions& opt = {}) {
    if (h_levels.size() < 2)
        throw SolverError("run_theorem_suite: at least two refinement levels required");
    std::sort(h_levels.begin(), h_levels.end(), std::greater<double>());

    TheoremReport rep;
    const auto rot = find_rotation(domain);
    rep.rotation_found = rot.has_value();
    rep.rotation = rot.value_or(0.0);
    rep.hypotheses = check_hypotheses(domain, rep.rotation);
    const DomainSpec working = rep.rotation != 0.0 ? domain.rotated(rep.rotation) : domain;

    EigenOptions eig;
    eig.seed = opt.seed;

    for (const double h : h_levels) {
        try {
            LevelData lv;
            lv.h = h;
            const Mesh mesh = triangulate(working, h);
            lv.nodes = mesh.node_count();
            lv.triangles = mesh.triangle_count();
            lv.min_angle_deg = mesh.min_angle_deg();

            const ScalarEigenResult rg =
                solve_smallest_scalar(mesh, assemble_scalar(mesh, DirichletPart::Gamma), 1, eig);
            const ScalarEigenResult rgc =
                solve_smallest_scalar(mesh, assemble_scalar(mesh, DirichletPart::GammaC), 1, eig);
            lv.lambda_gamma = rg.eigenvalues.front();
            lv.lambda_gammac = rgc.eigenvalues.front();

            const ConstraintMap cm = build_constraints(mesh, working);
            const FormMatrices curv = assemble_curvature(mesh, cm, working);
            const FormMatrices dc = assemble_divcurl(mesh, cm);
            const VectorEigenResult vr =
                solve_vector_evp(curv, opt.k_vector, opt.tol_kernel, VectorForm::Curvature, eig);
            lv.kernel_dim = vr.kernel_dim;
            lv.eta1 = vr.eigenvalues[static_cast<std::size_t>(vr.kernel_dim)];
            const double lam_min = std::min(lv.lambda_gamma, lv.lambda_gammac);
            lv.union_mismatch = std::abs(lv.eta1 - lam_min) / lam_min;
            lv.form_gap = compare_forms(vr.reduced.col(vr.kernel_dim), dc, curv).relative_gap;
            lv.minimizer = identify_minimizer(mesh, cm, curv, vr, rg, rgc);

            const auto grad = gradient_field(mesh, rgc.eigenfunctions.col(0));
            lv.monotonicity = monotonicity_report(grad);
            lv.hotspot = hotspot_report(mesh, working, rgc.eigenfunctions.col(0));
            rep.levels.push_back(std::move(lv));
        } catch (const Error& e) {
            rep.error = e.what();
            break;
        }
    }
    if (rep.levels.size() < 2) {
        if (rep.error.empty()) rep.error = "fewer than two levels completed";
        return rep;
    }

    const LevelData& fine = rep.levels.back();
    const LevelData& prev = rep.levels[rep.levels.size() - 2];
    const double ratio = prev.h / fine.h;

    // observed convergence rate from the three finest levels when available
    rep.observed_rate = 2.0;
    if (rep.levels.size() >= 3) {
        const LevelData& pprev = rep.levels[rep.levels.size() - 3];
        const double d1 = std::abs(prev.lambda_gammac - pprev.lambda_gammac);
        const double d2 = std::abs(fine.lambda_gammac - prev.lambda_gammac);
        if (d1 > 0.0 && d2 > 0.0)
            rep.observed_rate = std::clamp(std::log(d1 / d2) / std::log(ratio), 0.5, 2.5);
    }
    rep.lambda_gamma_extrapolated =
        detail::richardson(prev.lambda_gamma, fine.lambda_gamma, ratio, rep.observed_rate);
    rep.lambda_gammac_extrapolated =
        detail::richardson(prev.lambda_gammac, fine.lambda_gammac, ratio, rep.observed_rate);
    rep.inequality_margin = rep.lambda_gamma_extrapolated - rep.lambda_gammac_extrapolated;
    rep.drift = std::max(std::abs(fine.lambda_gamma - prev.lambda_gamma),
                         std::abs(fine.lambda_gammac - prev.lambda_gammac));

    // eigenvalue inequality: a strict statement needs margin above the
    // discretization drift
    if (rep.inequality_margin > 3.0 * rep.drift)
        rep.inequality = Verdict::Confirmed;
    else if (rep.inequality_margin < -3.0 * rep.drift)
        rep.inequality = Verdict::Refuted;
    else
        rep.inequality = Verdict::Inconclusive;

    // spectral union: the mismatch must shrink under refinement (or sit at
    // the solver floor already)
    const double floor = 1e-9;
    if (fine.union_mismatch <= floor || fine.union_mismatch < prev.union_mismatch)
        rep.spectral_union = Verdict::Confirmed;
    else if (fine.union_mismatch > 0.1)
        rep.spectral_union = Verdict::Refuted;
    else
        rep.spectral_union = Verdict::Inconclusive;

    if (!rep.hypotheses.all_pass()) {
        rep.monotonicity = Verdict::HypothesesNotMet;
        rep.hotspot = Verdict::HypothesesNotMet;
    } else {
        rep.monotonicity =
            fine.monotonicity.offending_triangles.empty() ? Verdict::Confirmed : Verdict::Refuted;
        bool hot_ok = true;
        for (std::size_t i = rep.levels.size() - 2; i < rep.levels.size(); ++i) {
            const LevelData& lv = rep.levels[i];
            if (lv.hotspot.corner_p) {
                if (!lv.hotspot.distance_to_p || *lv.hotspot.distance_to_p > 2.0 * lv.h)
                    hot_ok = false;
            } else if (!lv.hotspot.on_gamma) {
                hot_ok = false;
            }
        }
        rep.hotspot = hot_ok ? Verdict::Confirmed : Verdict::Refuted;
    }
    return rep;
}

struct ConvergenceRow {
    double h = 0.0;
    double lambda1 = 0.0;
    double rate = 0.0;  ///< 0 when not yet computable
    bool singular_flag = false;
};

/// Empirical convergence table for the lowest eigenvalue: rates from
/// consecutive triples, or from error pairs when the exact value is known.
/// Rates below 0.8 are flagged as singular-corner-dominated.
inline std::vector<ConvergenceRow> convergence_study(const DomainSpec& domain, DirichletPart part,
                                                     std::vector<double> h_levels,
                                                     std::optional<double> exact = std::nullopt,
                                                     const EigenOptions& eig = {}) {
    if (h_levels.size() < 3)
        throw SolverError("convergence_study: at least three levels required");
    std::sort(h_levels.begin(), h_levels.end(), std::greater<double>());
    std::vector<ConvergenceRow> rows;
    for (const double h : h_levels) {
        const Mesh mesh = triangulate(domain, h);
        ConvergenceRow row;
        row.h = h;
        row.lambda1 = solve_smallest_scalar(mesh, assemble_scalar(mesh, part), 1, eig)
                          .eigenvalues.front();
        rows.push_back(row);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double ratio = i > 0 ? rows[i - 1].h / rows[i].h : 2.0;
        if (exact && i >= 1) {
            const double e0 = std::abs(rows[i - 1].lambda1 - *exact);
            const double e1 = std::abs(rows[i].lambda1 - *exact);
            if (e0 > 0.0 && e1 > 0.0) rows[i].rate = std::log(e0 / e1) / std::log(ratio);
        } else if (i >= 2) {
            const double d0 = std::abs(rows[i - 1].lambda1 - rows[i - 2].lambda1);
            const double d1 = std::abs(rows[i].lambda1 - rows[i - 1].lambda1);
            if (d0 > 0.0 && d1 > 0.0) rows[i].rate = std::log(d0 / d1) / std::log(ratio);
        }
        if (rows[i].rate != 0.0 && rows[i].rate < 0.8) rows[i].singular_flag = true;
    }
    return rows;
}

} // namespace mixlap
