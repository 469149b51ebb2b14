#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mixlap/analysis.hpp"
#include "mixlap/report_json.hpp"
#include "support/test_domains.hpp"

using namespace mixlap;
using mixlap::testing::load_corpus;
using Catch::Approx;

namespace {

std::vector<double> levels(const DomainSpec& d, std::initializer_list<int> divs) {
    std::vector<double> out;
    for (int v : divs) out.push_back(d.diameter() / v);
    return out;
}

} // namespace

TEST_CASE("theorem suite on the acute triangle confirms everything") {
    const DomainSpec d = load_corpus("acute_triangle");
    const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16, 32}));
    REQUIRE(r.error.empty());
    CHECK(r.hypotheses.all_pass());
    CHECK(r.inequality == Verdict::Confirmed);
    CHECK(r.spectral_union == Verdict::Confirmed);
    CHECK(r.monotonicity == Verdict::Confirmed);
    CHECK(r.hotspot == Verdict::Confirmed);
    CHECK(r.inequality_margin > 0.0);
    CHECK(r.levels.back().kernel_dim == 0);
    for (const LevelData& lv : r.levels) CHECK(lv.lambda_gamma - lv.lambda_gammac > 0.0);
}

TEST_CASE("pre-rotated 50-60-70 triangle is recovered by the rotation search") {
    const DomainSpec d = testing::triangle_50_60_70().rotated(0.25);
    const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16, 32}));
    REQUIRE(r.error.empty());
    REQUIRE(r.rotation_found);
    const double target = 2.0 * M_PI - 0.25;
    CHECK(std::abs(r.rotation - target) < 1e-3);
    CHECK(r.hypotheses.all_pass());
    CHECK(r.inequality == Verdict::Confirmed);
    CHECK(r.monotonicity == Verdict::Confirmed);
    CHECK(r.hotspot == Verdict::Confirmed);
}

TEST_CASE("adjacent-sides square: hypotheses not met, equal eigenvalues, inconclusive inequality") {
    const DomainSpec d = load_corpus("square_adjacent_sides");
    const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16, 32}));
    REQUIRE(r.error.empty());
    CHECK_FALSE(r.hypotheses.all_pass());
    CHECK(r.monotonicity == Verdict::HypothesesNotMet);
    CHECK(r.hotspot == Verdict::HypothesesNotMet);
    CHECK(r.inequality == Verdict::Inconclusive);
    CHECK(r.lambda_gamma_extrapolated == Approx(0.5).epsilon(1e-3));
    CHECK(r.lambda_gammac_extrapolated == Approx(0.5).epsilon(1e-3));
    CHECK(std::abs(r.inequality_margin) < 1e-4);
    CHECK(r.spectral_union == Verdict::Confirmed);
}

TEST_CASE("opposite-sides square: kernel reported, monotonicity out of scope") {
    const DomainSpec d = load_corpus("square_opposite_sides");
    const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16, 32}));
    REQUIRE(r.error.empty());
    CHECK_FALSE(r.hypotheses.gamma_connected);
    CHECK(r.monotonicity == Verdict::HypothesesNotMet);
    CHECK(r.levels.back().kernel_dim == 1);
}

TEST_CASE("curved domains pass end to end") {
    for (const char* name : {"curved_triangle", "curved_quad"}) {
        const DomainSpec d = load_corpus(name);
        const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16, 32}));
        REQUIRE(r.error.empty());
        CHECK(r.hypotheses.all_pass());
        CHECK(r.inequality == Verdict::Confirmed);
        CHECK(r.monotonicity == Verdict::Confirmed);
        CHECK(r.hotspot == Verdict::Confirmed);
    }
}

TEST_CASE("suite requires two levels") {
    const DomainSpec d = load_corpus("acute_triangle");
    CHECK_THROWS_AS(run_theorem_suite(d, {0.2}), SolverError);
}

TEST_CASE("sub-solve failures are carried in the report, not thrown") {
    const DomainSpec d = load_corpus("acute_triangle");
    // absurdly small k cannot fail, so force failure with an impossible h
    // (zero target) through the mesher
    const TheoremReport r = run_theorem_suite(d, {0.2, 0.0});
    CHECK_FALSE(r.error.empty());
}

TEST_CASE("convergence study against exact values") {
    SECTION("adjacent-sides square converges at second order to 1/2") {
        const DomainSpec d = testing::square_adjacent_sides();
        const auto rows =
            convergence_study(d, DirichletPart::GammaC, {M_PI / 8, M_PI / 16, M_PI / 32}, 0.5);
        CHECK(rows.back().rate == Approx(2.0).margin(0.4));
        CHECK_FALSE(rows.back().singular_flag);
    }
    SECTION("all-Dirichlet unit square converges at second order to 2*pi^2") {
        const DomainSpec d = testing::square_opposite_sides();
        const auto rows = convergence_study(d, DirichletPart::All,
                                            {1.0 / 8, 1.0 / 16, 1.0 / 32}, 2.0 * M_PI * M_PI);
        CHECK(rows.back().rate == Approx(2.0).margin(0.4));
    }
    SECTION("reentrant corner degrades the order below two") {
        const DomainSpec d = testing::l_shape(BoundaryLabel::Gamma, BoundaryLabel::GammaC);
        const auto rows = convergence_study(
            d, DirichletPart::All, {d.diameter() / 8, d.diameter() / 16, d.diameter() / 32});
        CHECK(rows.back().rate < 1.9);
        CHECK(rows.back().rate > 0.8);
        CHECK_FALSE(rows.back().singular_flag);
    }
    SECTION("fewer than three levels is an error") {
        const DomainSpec d = testing::square_adjacent_sides();
        CHECK_THROWS_AS(convergence_study(d, DirichletPart::All, {0.4, 0.2}), SolverError);
    }
}

TEST_CASE("verdicts and eigenvalues are stable across solver seeds") {
    const DomainSpec d = load_corpus("pentagon");
    SuiteOptions a, b;
    a.seed = 1u;
    b.seed = 77777u;
    const TheoremReport ra = run_theorem_suite(d, levels(d, {8, 16}), a);
    const TheoremReport rb = run_theorem_suite(d, levels(d, {8, 16}), b);
    CHECK(ra.inequality == rb.inequality);
    CHECK(ra.spectral_union == rb.spectral_union);
    CHECK(ra.monotonicity == rb.monotonicity);
    CHECK(ra.hotspot == rb.hotspot);
    for (std::size_t i = 0; i < ra.levels.size(); ++i) {
        CHECK(std::abs(ra.levels[i].lambda_gamma - rb.levels[i].lambda_gamma) <= 1e-9);
        CHECK(std::abs(ra.levels[i].lambda_gammac - rb.levels[i].lambda_gammac) <= 1e-9);
        CHECK(std::abs(ra.levels[i].eta1 - rb.levels[i].eta1) <= 1e-9);
    }
}

TEST_CASE("eigenvalues are stable under triangle reordering") {
    const DomainSpec d = load_corpus("acute_triangle");
    const Mesh mesh = triangulate(d, d.diameter() / 16);
    Mesh permuted = mesh;
    std::mt19937 rng(5u);
    std::shuffle(permuted.triangles.begin(), permuted.triangles.end(), rng);
    const double l1 =
        solve_smallest_scalar(mesh, assemble_scalar(mesh, DirichletPart::GammaC), 1)
            .eigenvalues.front();
    const double l2 =
        solve_smallest_scalar(permuted, assemble_scalar(permuted, DirichletPart::GammaC), 1)
            .eigenvalues.front();
    CHECK(std::abs(l1 - l2) <= 1e-9);
}

TEST_CASE("report serialization is stable and complete") {
    const DomainSpec d = load_corpus("acute_triangle");
    const TheoremReport r = run_theorem_suite(d, levels(d, {8, 16}));
    const OrderedJson j = to_json(r);
    CHECK(j.contains("verdicts"));
    CHECK(j["verdicts"]["inequality"] == "confirmed");
    CHECK(j["levels"].size() == 2);
    // byte stability of the serialization itself
    CHECK(j.dump(2) == to_json(r).dump(2));
}
