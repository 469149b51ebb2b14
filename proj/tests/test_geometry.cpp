#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mixlap/domain_io.hpp"
#include "mixlap/geometry.hpp"
#include "support/test_domains.hpp"

using namespace mixlap;
using mixlap::testing::load_corpus;
using Catch::Approx;

TEST_CASE("boundary frame on a straight segment") {
    const DomainSpec sq = testing::square_opposite_sides();
    // bottom edge midpoint: tangent (1,0), exterior normal (0,-1), zero curvature
    const BoundaryFrame f = boundary_frame(sq, 0, 0.5);
    CHECK(f.point.x == Approx(0.5));
    CHECK(f.point.y == Approx(0.0).margin(1e-15));
    CHECK(f.tangent.x == Approx(1.0));
    CHECK(f.tangent.y == Approx(0.0).margin(1e-15));
    CHECK(f.normal.x == Approx(0.0).margin(1e-15));
    CHECK(f.normal.y == Approx(-1.0));
    CHECK(f.curvature == 0.0);
}

TEST_CASE("curvature of a counterclockwise circular boundary is -1/R") {
    for (const double R : {0.5, 1.0, 3.0}) {
        const DomainSpec d = testing::disk(R);
        for (int arc = 0; arc < 4; ++arc) {
            for (const double t : {0.0, 0.3, 0.7, 1.0}) {
                const BoundaryFrame f = boundary_frame(d, arc, t);
                CHECK(f.curvature == Approx(-1.0 / R).epsilon(1e-12));
                // exterior normal points radially outward
                CHECK(f.normal.dot(f.point.normalized()) == Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("polynomial arc frame matches the circular parametrization") {
    // quadratic Bezier-like arc; compare against finite differences
    const Arc a = Arc::polynomial({0.0, 1.0, -0.3}, {0.0, 0.5, 0.4}, BoundaryLabel::Gamma);
    for (const double t : {0.1, 0.5, 0.9}) {
        const BoundaryFrame f = a.frame(t);
        const double eps = 1e-6;
        const Vec2 fd = (a.point(t + eps) - a.point(t - eps)) / (2.0 * eps);
        CHECK(f.tangent.x == Approx(fd.normalized().x).margin(1e-8));
        CHECK(f.tangent.y == Approx(fd.normalized().y).margin(1e-8));
    }
}

TEST_CASE("frame invariants hold on all corpus arcs") {
    for (const char* name : {"square_opposite_sides", "square_adjacent_sides", "acute_triangle",
                             "curved_triangle", "curved_quad", "pentagon"}) {
        const DomainSpec d = load_corpus(name);
        for (int i = 0; i < d.arc_count(); ++i) {
            for (int s = 0; s <= 32; ++s) {
                const BoundaryFrame f = boundary_frame(d, i, s / 32.0);
                REQUIRE(f.tangent.norm() == Approx(1.0).epsilon(1e-12));
                REQUIRE(f.normal.norm() == Approx(1.0).epsilon(1e-12));
                REQUIRE(std::abs(f.tangent.dot(f.normal)) < 1e-12);
                REQUIRE(std::abs(f.normal.x - f.tangent.y) < 1e-12);
                REQUIRE(std::abs(f.normal.y + f.tangent.x) < 1e-12);
            }
        }
    }
}

TEST_CASE("degenerate parametrization is rejected") {
    // r(t) = ((t-0.5)^2, (t-0.5)^3) has r'(0.5) = 0
    CHECK_THROWS_AS(Arc::polynomial({0.25, -1.0, 1.0}, {-0.125, 0.75, -1.5, 1.0},
                                    BoundaryLabel::Gamma),
                    GeometryError);
}

TEST_CASE("non-simple loops are rejected") {
    std::vector<Arc> bowtie;
    bowtie.push_back(Arc::segment({0, 0}, {1, 1}, BoundaryLabel::Gamma));
    bowtie.push_back(Arc::segment({1, 1}, {1, 0}, BoundaryLabel::GammaC));
    bowtie.push_back(Arc::segment({1, 0}, {0, 1}, BoundaryLabel::Gamma));
    bowtie.push_back(Arc::segment({0, 1}, {0, 0}, BoundaryLabel::GammaC));
    CHECK_THROWS_AS(DomainSpec(std::move(bowtie)), GeometryError);
}

TEST_CASE("loop closure is enforced") {
    std::vector<Arc> open;
    open.push_back(Arc::segment({0, 0}, {1, 0}, BoundaryLabel::Gamma));
    open.push_back(Arc::segment({1, 1e-6}, {0, 1}, BoundaryLabel::GammaC));
    open.push_back(Arc::segment({0, 1}, {0, 0}, BoundaryLabel::Gamma));
    CHECK_THROWS_AS(DomainSpec(std::move(open)), GeometryError);
}

TEST_CASE("clockwise loops are rejected") {
    std::vector<Arc> cw;
    cw.push_back(Arc::segment({0, 0}, {0, 1}, BoundaryLabel::Gamma));
    cw.push_back(Arc::segment({0, 1}, {1, 1}, BoundaryLabel::GammaC));
    cw.push_back(Arc::segment({1, 1}, {1, 0}, BoundaryLabel::Gamma));
    cw.push_back(Arc::segment({1, 0}, {0, 0}, BoundaryLabel::GammaC));
    CHECK_THROWS_AS(DomainSpec(std::move(cw)), GeometryError);
}

TEST_CASE("interior angles") {
    SECTION("square corners are right angles") {
        const DomainSpec sq = testing::square_opposite_sides();
        for (int c = 0; c < 4; ++c) CHECK(interior_angle(sq, c) == Approx(M_PI / 2).epsilon(1e-12));
    }
    SECTION("equilateral triangle corner") {
        const DomainSpec tri = testing::equilateral_triangle();
        for (int c = 0; c < 3; ++c) CHECK(interior_angle(tri, c) == Approx(M_PI / 3).epsilon(1e-12));
    }
    SECTION("reflex corner of the L-shaped hexagon") {
        const DomainSpec l = testing::l_shape(BoundaryLabel::Gamma, BoundaryLabel::GammaC);
        double reflex = 0.0;
        for (int c = 0; c < 6; ++c) reflex = std::max(reflex, interior_angle(l, c));
        CHECK(reflex == Approx(3.0 * M_PI / 2.0).epsilon(1e-12));
    }
    SECTION("invalid index throws") {
        const DomainSpec sq = testing::square_opposite_sides();
        CHECK_THROWS_AS(interior_angle(sq, 17), GeometryError);
    }
}

TEST_CASE("discrete Gauss-Bonnet: polygon turning angles sum to 2*pi") {
    const auto sum_turns = [](const DomainSpec& d) {
        double s = 0.0;
        for (std::size_t c = 0; c < d.corners().size(); ++c)
            s += M_PI - d.corners()[c].interior_angle;
        return s;
    };
    CHECK(sum_turns(testing::square_opposite_sides()) == Approx(2 * M_PI).epsilon(1e-10));
    CHECK(sum_turns(testing::equilateral_triangle()) == Approx(2 * M_PI).epsilon(1e-10));
    CHECK(sum_turns(testing::l_shape(BoundaryLabel::Gamma, BoundaryLabel::GammaC)) ==
          Approx(2 * M_PI).epsilon(1e-10));
    CHECK(sum_turns(load_corpus("pentagon")) == Approx(2 * M_PI).epsilon(1e-10));
}

TEST_CASE("rotation round trip reproduces boundary frames") {
    const DomainSpec d = load_corpus("curved_triangle");
    const double theta = 0.7368;
    const DomainSpec back = d.rotated(theta).rotated(-theta);
    for (int i = 0; i < d.arc_count(); ++i) {
        for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const BoundaryFrame f0 = boundary_frame(d, i, t);
            const BoundaryFrame f1 = boundary_frame(back, i, t);
            CHECK(distance(f0.point, f1.point) < 1e-10);
            CHECK(distance(f0.tangent, f1.tangent) < 1e-10);
            CHECK(distance(f0.normal, f1.normal) < 1e-10);
            CHECK(std::abs(f0.curvature - f1.curvature) < 1e-10);
        }
    }
}

TEST_CASE("hypothesis check on the acute triangle passes at zero rotation") {
    const HypothesisReport rep = check_hypotheses(load_corpus("acute_triangle"), 0.0);
    CHECK(rep.hyp1_ok);
    CHECK(rep.gamma_connected);
    CHECK(rep.gammac_connected);
    CHECK(rep.quadrant_ok_gamma);
    CHECK(rep.quadrant_ok_gammac);
    CHECK(rep.transition_angles_ok);
    CHECK_FALSE(rep.reflex_corner_present);
    CHECK(rep.all_pass());
    CHECK(rep.witnesses.empty());
}

TEST_CASE("adjacent-sides square: quadrants pass, right-angle transitions fail") {
    const HypothesisReport rep = check_hypotheses(load_corpus("square_adjacent_sides"), 0.0);
    CHECK(rep.quadrant_ok_gamma);
    CHECK(rep.quadrant_ok_gammac);
    CHECK(rep.gamma_connected);
    CHECK(rep.gammac_connected);
    CHECK_FALSE(rep.transition_angles_ok);
    CHECK(rep.max_transition_angle == Approx(M_PI / 2).epsilon(1e-12));
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("opposite-sides square: both parts disconnected") {
    const HypothesisReport rep = check_hypotheses(load_corpus("square_opposite_sides"), 0.0);
    CHECK_FALSE(rep.gamma_connected);
    CHECK_FALSE(rep.gammac_connected);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("witnesses are recorded exactly when a quadrant check fails") {
    const HypothesisReport rep = check_hypotheses(load_corpus("square_opposite_sides"), 0.0);
    const bool has_gc_witness =
        std::any_of(rep.witnesses.begin(), rep.witnesses.end(), [](const HypothesisWitness& w) {
            return w.condition.find("Q3") != std::string::npos;
        });
    CHECK(rep.quadrant_ok_gammac == !has_gc_witness);
}

TEST_CASE("hypothesis verdicts are rotation covariant") {
    const DomainSpec d = load_corpus("acute_triangle");
    for (const double theta : {0.13, 1.1, 2.9}) {
        const HypothesisReport a = check_hypotheses(d.rotated(theta), 0.0);
        const HypothesisReport b = check_hypotheses(d, theta);
        CHECK(a.all_pass() == b.all_pass());
        CHECK(a.quadrant_ok_gamma == b.quadrant_ok_gamma);
        CHECK(a.quadrant_ok_gammac == b.quadrant_ok_gammac);
        CHECK(a.max_transition_angle == Approx(b.max_transition_angle).margin(1e-9));
    }
}

TEST_CASE("find_rotation returns a compliant angle") {
    SECTION("already compliant triangle: angle near zero") {
        const auto r = find_rotation(load_corpus("acute_triangle"));
        REQUIRE(r.has_value());
        const double wrapped = std::min(*r, 2 * M_PI - *r);
        CHECK(wrapped < 0.05);
        CHECK(check_hypotheses(load_corpus("acute_triangle"), *r).all_pass());
    }
    SECTION("pre-rotated triangle: inverse rotation is recovered") {
        const DomainSpec rot = load_corpus("acute_triangle").rotated(0.3);
        const auto r = find_rotation(rot);
        REQUIRE(r.has_value());
        CHECK(check_hypotheses(rot, *r).all_pass());
        const double target = 2 * M_PI - 0.3;
        CHECK(std::abs(*r - target) < 1e-3);
    }
    SECTION("disk with Neumann upper half: no rotation works") {
        CHECK_FALSE(find_rotation(testing::disk(1.0)).has_value());
    }
}

TEST_CASE("hotspot corner detection") {
    SECTION("acute triangle has a unique apex corner") {
        const DomainSpec d = load_corpus("acute_triangle");
        const auto p = hotspot_corner(d);
        REQUIRE(p.has_value());
        // apex = the corner between the two Neumann sides
        Vec2 apex;
        for (const Corner& c : d.corners())
            if (d.arc(c.arc_in).label() == BoundaryLabel::Gamma &&
                d.arc(c.arc_out).label() == BoundaryLabel::Gamma)
                apex = c.position;
        CHECK(distance(*p, apex) < 1e-12);
    }
    SECTION("axis-parallel Neumann segment suppresses the corner") {
        CHECK_FALSE(hotspot_corner(load_corpus("curved_quad")).has_value());
        CHECK_FALSE(hotspot_corner(load_corpus("square_opposite_sides")).has_value());
    }
    SECTION("pentagon apex") {
        CHECK(hotspot_corner(load_corpus("pentagon")).has_value());
    }
}

TEST_CASE("domain file parsing") {
    SECTION("all corpus files parse and validate") {
        for (const char* name : {"square_opposite_sides", "square_adjacent_sides", "acute_triangle",
                                 "curved_triangle", "curved_quad", "pentagon"}) {
            CHECK_NOTHROW(load_corpus(name));
        }
    }
    SECTION("unknown keys are rejected") {
        const auto doc = nlohmann::json::parse(R"({"arcs": [], "extra": 1})");
        CHECK_THROWS_AS(parse_domain_json(doc), IoError);
    }
    SECTION("unknown arc kind is rejected") {
        const auto doc = nlohmann::json::parse(
            R"({"arcs": [{"kind": "spline", "data": {}, "label": "gamma"}]})");
        CHECK_THROWS_AS(parse_domain_json(doc), IoError);
    }
    SECTION("bad label is rejected") {
        const auto doc = nlohmann::json::parse(
            R"({"arcs": [{"kind": "segment", "data": {"p0": [0,0], "p1": [1,0]}, "label": "dirichlet"}]})");
        CHECK_THROWS_AS(parse_domain_json(doc), IoError);
    }
    SECTION("unknown data key is rejected") {
        const auto doc = nlohmann::json::parse(
            R"({"arcs": [{"kind": "segment", "data": {"p0": [0,0], "p1": [1,0], "q": 2}, "label": "gamma"}]})");
        CHECK_THROWS_AS(parse_domain_json(doc), IoError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_domain("/nonexistent/file.json"), IoError);
    }
}

TEST_CASE("star hexagon is a valid domain with disconnected Neumann part") {
    const DomainSpec star = testing::star_hexagon();
    CHECK_FALSE(star.label_connected(BoundaryLabel::Gamma));
    for (const Corner& c : star.corners())
        CHECK(c.interior_angle == Approx(80.0 * M_PI / 180.0).epsilon(1e-9));
    // concave pieces carry positive curvature in this sign convention
    CHECK(boundary_frame(star, 0, 0.5).curvature > 0.0);
}
