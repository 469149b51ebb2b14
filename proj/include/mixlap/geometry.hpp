#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixlap/errors.hpp"

namespace mixlap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    /// Rotation by +90 degrees.
    Vec2 perp() const { return {-y, x}; }
    Vec2 rotated(double angle) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

enum class BoundaryLabel : std::uint8_t { Gamma, GammaC };

inline const char* to_string(BoundaryLabel l) {
    return l == BoundaryLabel::Gamma ? "gamma" : "gammac";
}

/// Point, unit tangent (positive orientation), exterior unit normal and
/// signed curvature of the boundary. The curvature sign convention makes
/// kappa <= 0 on convex domains.
struct BoundaryFrame {
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;
    double curvature = 0.0;
};

/// One smooth boundary piece, parametrized over t in [0,1] and traversed in
/// positive (counterclockwise) boundary orientation.
class Arc {
public:
    enum class Kind : std::uint8_t { Segment, CircularArc, Polynomial };

    static Arc segment(Vec2 p0, Vec2 p1, BoundaryLabel label) {
        Arc a;
        a.kind_ = Kind::Segment;
        a.label_ = label;
        a.p0_ = p0;
        a.p1_ = p1;
        a.finalize();
        return a;
    }

    /// Circular arc around `center`: point(t) = center + R * (cos, sin)(angle0 + t*(angle1-angle0)).
    /// angle1 > angle0 traverses counterclockwise (convex bulge on a positively
    /// oriented boundary), angle1 < angle0 clockwise (concave piece).
    static Arc circular(Vec2 center, double radius, double angle0, double angle1,
                        BoundaryLabel label) {
        if (!(radius > 0.0))
            throw GeometryError("circular arc requires positive radius");
        if (angle0 == angle1)
            throw GeometryError("circular arc requires a nonzero angle range");
        Arc a;
        a.kind_ = Kind::CircularArc;
        a.label_ = label;
        a.center_ = center;
        a.radius_ = radius;
        a.angle0_ = angle0;
        a.angle1_ = angle1;
        a.finalize();
        return a;
    }

    /// x(t) = sum coeffs_x[i] t^i, y(t) = sum coeffs_y[i] t^i, t in [0,1].
    static Arc polynomial(std::vector<double> coeffs_x, std::vector<double> coeffs_y,
                          BoundaryLabel label) {
        if (coeffs_x.size() < 2 || coeffs_y.size() < 2)
            throw GeometryError("polynomial arc requires degree >= 1");
        Arc a;
        a.kind_ = Kind::Polynomial;
        a.label_ = label;
        a.cx_ = std::move(coeffs_x);
        a.cy_ = std::move(coeffs_y);
        a.finalize();
        return a;
    }

    Kind kind() const { return kind_; }
    BoundaryLabel label() const { return label_; }

    Vec2 point(double t) const {
        switch (kind_) {
        case Kind::Segment:
            return p0_ + t * (p1_ - p0_);
        case Kind::CircularArc: {
            const double a = angle0_ + t * (angle1_ - angle0_);
            return center_ + radius_ * Vec2{std::cos(a), std::sin(a)};
        }
        case Kind::Polynomial:
            return {horner(cx_, t), horner(cy_, t)};
        }
        return {};
    }

    Vec2 derivative(double t) const {
        switch (kind_) {
        case Kind::Segment:
            return p1_ - p0_;
        case Kind::CircularArc: {
            const double sweep = angle1_ - angle0_;
            const double a = angle0_ + t * sweep;
            return radius_ * sweep * Vec2{-std::sin(a), std::cos(a)};
        }
        case Kind::Polynomial:
            return {horner_derivative(cx_, t), horner_derivative(cy_, t)};
        }
        return {};
    }

    Vec2 second_derivative(double t) const {
        switch (kind_) {
        case Kind::Segment:
            return {0.0, 0.0};
        case Kind::CircularArc: {
            const double sweep = angle1_ - angle0_;
            const double a = angle0_ + t * sweep;
            return radius_ * sweep * sweep * Vec2{-std::cos(a), -std::sin(a)};
        }
        case Kind::Polynomial:
            return {horner_second(cx_, t), horner_second(cy_, t)};
        }
        return {};
    }

    /// Frame at parameter t. Throws on a degenerate parametrization.
    BoundaryFrame frame(double t) const {
        const Vec2 d = derivative(t);
        const double speed = d.norm();
        if (speed < 1e-12)
            throw GeometryError("degenerate arc parametrization: |r'(t)| < 1e-12");
        const Vec2 tau = d / speed;
        const Vec2 nu{tau.y, -tau.x};
        const Vec2 dd = second_derivative(t);
        // standard curvature of the parametrized curve, sign flipped so that
        // convex domains get kappa <= 0
        const double kappa = -(d.x * dd.y - d.y * dd.x) / (speed * speed * speed);
        return {point(t), tau, nu, kappa};
    }

    double length() const { return arclength_.back(); }

    /// Arclength of [0, t].
    double arclength_at(double t) const {
        if (kind_ == Kind::Segment) return t * (p1_ - p0_).norm();
        if (kind_ == Kind::CircularArc) return t * radius_ * std::abs(angle1_ - angle0_);
        const double u = std::clamp(t, 0.0, 1.0) * kTableSize;
        const int i = std::min(static_cast<int>(u), kTableSize - 1);
        const double f = u - i;
        return arclength_[i] + f * (arclength_[i + 1] - arclength_[i]);
    }

    /// Inverse of arclength_at (piecewise-linear on the cached table).
    double param_at_arclength(double s) const {
        if (kind_ == Kind::Segment || kind_ == Kind::CircularArc)
            return std::clamp(s / length(), 0.0, 1.0);
        s = std::clamp(s, 0.0, arclength_.back());
        const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
        int i = static_cast<int>(it - arclength_.begin()) - 1;
        i = std::clamp(i, 0, kTableSize - 1);
        const double seg = arclength_[i + 1] - arclength_[i];
        const double f = seg > 0.0 ? (s - arclength_[i]) / seg : 0.0;
        return (i + f) / kTableSize;
    }

    /// Parameter of the point on the arc closest to p (coarse scan + ternary refinement).
    double closest_param(Vec2 p) const {
        const int n = 128;
        double best_t = 0.0, best_d = (point(0.0) - p).squared_norm();
        for (int i = 1; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double d = (point(t) - p).squared_norm();
            if (d < best_d) { best_d = d; best_t = t; }
        }
        double lo = std::max(0.0, best_t - 1.0 / n), hi = std::min(1.0, best_t + 1.0 / n);
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if ((point(m1) - p).squared_norm() < (point(m2) - p).squared_norm())
                hi = m2;
            else
                lo = m1;
        }
        return 0.5 * (lo + hi);
    }

    Arc rotated(double angle) const {
        Arc a = *this;
        switch (kind_) {
        case Kind::Segment:
            a.p0_ = p0_.rotated(angle);
            a.p1_ = p1_.rotated(angle);
            break;
        case Kind::CircularArc:
            a.center_ = center_.rotated(angle);
            a.angle0_ = angle0_ + angle;
            a.angle1_ = angle1_ + angle;
            break;
        case Kind::Polynomial: {
            const double c = std::cos(angle), s = std::sin(angle);
            const std::size_t n = std::max(cx_.size(), cy_.size());
            a.cx_.assign(n, 0.0);
            a.cy_.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = i < cx_.size() ? cx_[i] : 0.0;
                const double yi = i < cy_.size() ? cy_[i] : 0.0;
                a.cx_[i] = c * xi - s * yi;
                a.cy_[i] = s * xi + c * yi;
            }
            break;
        }
        }
        a.finalize();
        return a;
    }

    // accessors for IO
    Vec2 seg_p0() const { return p0_; }
    Vec2 seg_p1() const { return p1_; }
    Vec2 circ_center() const { return center_; }
    double circ_radius() const { return radius_; }
    double circ_angle0() const { return angle0_; }
    double circ_angle1() const { return angle1_; }
    const std::vector<double>& poly_x() const { return cx_; }
    const std::vector<double>& poly_y() const { return cy_; }

private:
    static constexpr int kTableSize = 1024;

    static double horner(const std::vector<double>& c, double t) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
        return v;
    }
    static double horner_derivative(const std::vector<double>& c, double t) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 1;) v = v * t + static_cast<double>(i) * c[i];
        return v;
    }
    static double horner_second(const std::vector<double>& c, double t) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 2;)
            v = v * t + static_cast<double>(i) * static_cast<double>(i - 1) * c[i];
        return v;
    }

    void finalize() {
        validate_regular();
        validate_simple();
        build_arclength_table();
    }

    // |r'(t)| > 0 at sample points
    void validate_regular() const {
        constexpr int kSamples = 65;
        for (int i = 0; i < kSamples; ++i) {
            const double t = static_cast<double>(i) / (kSamples - 1);
            if (derivative(t).norm() < 1e-12)
                throw GeometryError("arc parametrization derivative vanishes");
        }
    }

    // sampled polyline has no self-intersections
    void validate_simple() const {
        constexpr int n = 64;
        std::array<Vec2, n + 1> pts;
        for (int i = 0; i <= n; ++i) pts[i] = point(static_cast<double>(i) / n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]))
                    throw GeometryError("arc is not simple (self-intersecting)");
            }
        }
    }

    void build_arclength_table() {
        arclength_.assign(kTableSize + 1, 0.0);
        if (kind_ == Kind::Segment) {
            const double L = (p1_ - p0_).norm();
            for (int i = 0; i <= kTableSize; ++i)
                arclength_[i] = L * i / kTableSize;
            return;
        }
        if (kind_ == Kind::CircularArc) {
            const double L = radius_ * std::abs(angle1_ - angle0_);
            for (int i = 0; i <= kTableSize; ++i)
                arclength_[i] = L * i / kTableSize;
            return;
        }
        // composite trapezoid on |r'|
        double prev = derivative(0.0).norm();
        for (int i = 1; i <= kTableSize; ++i) {
            const double t = static_cast<double>(i) / kTableSize;
            const double cur = derivative(t).norm();
            arclength_[i] = arclength_[i - 1] + 0.5 * (prev + cur) / kTableSize;
            prev = cur;
        }
    }

public:
    static bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        const auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
            const double v = (q - p).cross(r - p);
            const double scale = (q - p).norm() * (r - p).norm();
            if (std::abs(v) <= 1e-14 * std::max(scale, 1e-300)) return 0;
            return v > 0 ? 1 : -1;
        };
        const int o1 = orient(a, b, c), o2 = orient(a, b, d);
        const int o3 = orient(c, d, a), o4 = orient(c, d, b);
        if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
        const auto on_seg = [](Vec2 p, Vec2 q, Vec2 r) {
            return std::min(p.x, q.x) - 1e-14 <= r.x && r.x <= std::max(p.x, q.x) + 1e-14 &&
                   std::min(p.y, q.y) - 1e-14 <= r.y && r.y <= std::max(p.y, q.y) + 1e-14;
        };
        if (o1 == 0 && on_seg(a, b, c)) return true;
        if (o2 == 0 && on_seg(a, b, d)) return true;
        if (o3 == 0 && on_seg(c, d, a)) return true;
        if (o4 == 0 && on_seg(c, d, b)) return true;
        return false;
    }

private:
    Kind kind_ = Kind::Segment;
    BoundaryLabel label_ = BoundaryLabel::Gamma;
    Vec2 p0_, p1_;                 // segment
    Vec2 center_;                  // circular
    double radius_ = 0.0, angle0_ = 0.0, angle1_ = 0.0;
    std::vector<double> cx_, cy_;  // polynomial
    std::vector<double> arclength_;
};

/// Loop vertex between two consecutive arcs.
struct Corner {
    int arc_in = 0;   ///< arc ending at this corner
    int arc_out = 0;  ///< arc starting at this corner
    Vec2 position;
    double interior_angle = 0.0;  ///< measured inside the domain, in (0, 2*pi)
};

/// A positively oriented closed loop of labeled smooth arcs.
class DomainSpec {
public:
    explicit DomainSpec(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
        if (arcs_.size() < 2)
            throw GeometryError("domain requires at least two arcs");
        validate_closure();
        validate_labels();
        build_corners();
        validate_loop();
    }

    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(int i) const { return arcs_.at(static_cast<std::size_t>(i)); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }
    const std::vector<Corner>& corners() const { return corners_; }

    double diameter() const { return diameter_; }
    double boundary_length() const {
        double L = 0.0;
        for (const Arc& a : arcs_) L += a.length();
        return L;
    }

    DomainSpec rotated(double angle) const {
        std::vector<Arc> r;
        r.reserve(arcs_.size());
        for (const Arc& a : arcs_) r.push_back(a.rotated(angle));
        return DomainSpec(std::move(r));
    }

    bool label_connected(BoundaryLabel l) const {
        const int n = arc_count();
        int runs = 0;
        for (int i = 0; i < n; ++i) {
            const bool cur = arcs_[i].label() == l;
            const bool prev = arcs_[(i + n - 1) % n].label() == l;
            if (cur && !prev) ++runs;
        }
        if (runs == 0) {
            // all arcs same label; caller guaranteed both labels present
            return true;
        }
        return runs == 1;
    }

    /// Fine sampling of the whole boundary (for area/orientation checks).
    std::vector<Vec2> sample_boundary(int per_arc) const {
        std::vector<Vec2> pts;
        pts.reserve(arcs_.size() * static_cast<std::size_t>(per_arc));
        for (const Arc& a : arcs_)
            for (int i = 0; i < per_arc; ++i)
                pts.push_back(a.point(static_cast<double>(i) / per_arc));
        return pts;
    }

private:
    void validate_closure() const {
        const int n = arc_count();
        for (int i = 0; i < n; ++i) {
            const Vec2 e = arcs_[i].point(1.0);
            const Vec2 s = arcs_[(i + 1) % n].point(0.0);
            if (distance(e, s) > 1e-12)
                throw GeometryError("arc endpoints do not close the loop (gap > 1e-12)");
        }
    }

    void validate_labels() const {
        bool has_g = false, has_gc = false;
        for (const Arc& a : arcs_) {
            if (a.label() == BoundaryLabel::Gamma) has_g = true;
            else has_gc = true;
        }
        if (!has_g || !has_gc)
            throw GeometryError("both boundary labels must occur at least once");
    }

    void build_corners() {
        const int n = arc_count();
        corners_.clear();
        corners_.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            const Vec2 ti = arcs_[i].frame(1.0).tangent;
            const Vec2 tj = arcs_[j].frame(0.0).tangent;
            const double turn = std::atan2(ti.cross(tj), ti.dot(tj));
            Corner c;
            c.arc_in = i;
            c.arc_out = j;
            c.position = arcs_[j].point(0.0);
            c.interior_angle = M_PI - turn;
            corners_.push_back(c);
        }
    }

    void validate_loop() {
        const std::vector<Vec2> pts = sample_boundary(64);
        const std::size_t n = pts.size();
        double area2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) area2 += pts[i].cross(pts[(i + 1) % n]);
        if (area2 <= 0.0)
            throw GeometryError("boundary loop is not positively oriented");
        // simplicity of the sampled polyline
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (Arc::segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                    throw GeometryError("boundary loop is not simple");
            }
        }
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d = std::max(d, (pts[i] - pts[j]).squared_norm());
        diameter_ = std::sqrt(d);
    }

    std::vector<Arc> arcs_;
    std::vector<Corner> corners_;
    double diameter_ = 0.0;
};

inline BoundaryFrame boundary_frame(const DomainSpec& domain, int arc_id, double t) {
    if (arc_id < 0 || arc_id >= domain.arc_count())
        throw GeometryError("boundary_frame: invalid arc index");
    if (t < 0.0 || t > 1.0)
        throw GeometryError("boundary_frame: parameter outside [0,1]");
    return domain.arc(arc_id).frame(t);
}

inline double interior_angle(const DomainSpec& domain, int corner_index) {
    const auto& cs = domain.corners();
    if (corner_index < 0 || corner_index >= static_cast<int>(cs.size()))
        throw GeometryError("interior_angle: invalid corner index");
    return cs[static_cast<std::size_t>(corner_index)].interior_angle;
}

struct HypothesisWitness {
    int arc = -1;
    double parameter = 0.0;
    Vec2 normal;
    std::string condition;
};

struct HypothesisReport {
    bool hyp1_ok = false;
    bool gamma_connected = false;
    bool gammac_connected = false;
    std::vector<double> transition_angles;
    double max_transition_angle = 0.0;
    bool transition_angles_ok = false;
    bool reflex_corner_present = false;
    bool quadrant_ok_gamma = false;
    bool quadrant_ok_gammac = false;
    double rotation_applied = 0.0;
    std::vector<HypothesisWitness> witnesses;

    /// Regularity conditions for the curvature form: both parts connected,
    /// transition angles strictly below pi/2, no inward corner.
    bool form_hypotheses_ok() const {
        return hyp1_ok && gamma_connected && gammac_connected && transition_angles_ok &&
               !reflex_corner_present;
    }

    /// All conditions of the monotonicity/inequality theorem hold.
    bool all_pass() const {
        return form_hypotheses_ok() && quadrant_ok_gamma && quadrant_ok_gammac;
    }
};

namespace detail {
constexpr double kQuadrantTol = 1e-9;
constexpr double kAngleTol = 1e-6;
constexpr int kNormalSamples = 257;
} // namespace detail

/// Checks the geometric hypotheses after rotating the domain by `rotation`:
/// exterior normals on the Dirichlet part lie in the closed third quadrant,
/// normals on the Neumann part in the closed second or fourth quadrant,
/// both parts are contiguous runs of arcs, the transition angles are strictly
/// below pi/2 and no corner points inward. Failures are reported with
/// witnesses, never thrown.
inline HypothesisReport check_hypotheses(const DomainSpec& domain, double rotation) {
    const DomainSpec d = rotation != 0.0 ? domain.rotated(rotation) : domain;
    HypothesisReport rep;
    rep.rotation_applied = rotation;
    rep.hyp1_ok = true;  // structural invariants were validated on construction
    rep.gamma_connected = d.label_connected(BoundaryLabel::Gamma);
    rep.gammac_connected = d.label_connected(BoundaryLabel::GammaC);

    rep.quadrant_ok_gamma = true;
    rep.quadrant_ok_gammac = true;
    for (int i = 0; i < d.arc_count(); ++i) {
        const Arc& a = d.arc(i);
        for (int s = 0; s < detail::kNormalSamples; ++s) {
            const double t = static_cast<double>(s) / (detail::kNormalSamples - 1);
            const Vec2 nu = a.frame(t).normal;
            if (a.label() == BoundaryLabel::GammaC) {
                if (!(nu.x <= detail::kQuadrantTol && nu.y <= detail::kQuadrantTol)) {
                    rep.quadrant_ok_gammac = false;
                    rep.witnesses.push_back({i, t, nu, "normal outside closed Q3 on gammac"});
                }
            } else {
                if (!(nu.x * nu.y <= detail::kQuadrantTol)) {
                    rep.quadrant_ok_gamma = false;
                    rep.witnesses.push_back({i, t, nu, "normal outside closed Q2/Q4 on gamma"});
                }
            }
        }
    }

    rep.transition_angles_ok = true;
    for (const Corner& c : d.corners()) {
        if (c.interior_angle > M_PI + 1e-9) {
            rep.reflex_corner_present = true;
            rep.witnesses.push_back(
                {c.arc_out, 0.0, d.arc(c.arc_out).frame(0.0).normal, "inward-pointing corner"});
        }
        if (d.arc(c.arc_in).label() != d.arc(c.arc_out).label()) {
            rep.transition_angles.push_back(c.interior_angle);
            if (!(c.interior_angle < M_PI / 2.0 - detail::kAngleTol)) {
                rep.transition_angles_ok = false;
                rep.witnesses.push_back({c.arc_out, 0.0, d.arc(c.arc_out).frame(0.0).normal,
                                         "transition angle not strictly below pi/2"});
            }
        }
    }
    rep.max_transition_angle = rep.transition_angles.empty()
                                   ? 0.0
                                   : *std::max_element(rep.transition_angles.begin(),
                                                       rep.transition_angles.end());
    return rep;
}

/// Scans rotations on a 3600-step grid, refines the edges of the passing
/// window by bisection and returns its midpoint, or nothing if no rotation
/// makes all checks pass.
inline std::optional<double> find_rotation(const DomainSpec& domain) {
    constexpr int kGrid = 3600;
    const auto passes = [&domain](double angle) {
        return check_hypotheses(domain, angle).all_pass();
    };
    int first = -1;
    for (int i = 0; i < kGrid; ++i) {
        if (passes(2.0 * M_PI * i / kGrid)) {
            first = i;
            break;
        }
    }
    if (first < 0) return std::nullopt;

    const double step = 2.0 * M_PI / kGrid;
    // walk to the grid edges of the passing window (window may wrap)
    int lo = first, hi = first, n_pass = 1;
    while (n_pass < kGrid && passes(step * (lo - 1))) { --lo; ++n_pass; }
    while (n_pass < kGrid && passes(step * (hi + 1))) { ++hi; ++n_pass; }
    if (n_pass >= kGrid) return 0.0;  // every rotation passes

    auto bisect = [&](double pass_a, double fail_b) {
        for (int i = 0; i < 50; ++i) {
            const double m = 0.5 * (pass_a + fail_b);
            if (passes(m)) pass_a = m; else fail_b = m;
        }
        return pass_a;
    };
    const double left = bisect(step * lo, step * (lo - 1));
    const double right = bisect(step * hi, step * (hi + 1));
    double mid = 0.5 * (left + right);
    mid = std::fmod(mid, 2.0 * M_PI);
    if (mid < 0.0) mid += 2.0 * M_PI;
    return mid;
}

/// The corner P inside the Neumann part at which the exterior normal jumps
/// from the fourth to the second quadrant; absent when the Neumann part
/// contains an axis-parallel straight segment or no such corner exists.
inline std::optional<Vec2> hotspot_corner(const DomainSpec& domain) {
    for (const Arc& a : domain.arcs()) {
        if (a.label() != BoundaryLabel::Gamma || a.kind() != Arc::Kind::Segment) continue;
        const Vec2 d = a.seg_p1() - a.seg_p0();
        if (std::abs(d.x) <= 1e-12 * d.norm() || std::abs(d.y) <= 1e-12 * d.norm())
            return std::nullopt;
    }
    const double q = detail::kQuadrantTol;
    std::optional<Vec2> found;
    for (const Corner& c : domain.corners()) {
        if (domain.arc(c.arc_in).label() != BoundaryLabel::Gamma ||
            domain.arc(c.arc_out).label() != BoundaryLabel::Gamma)
            continue;
        const Vec2 ni = domain.arc(c.arc_in).frame(1.0).normal;
        const Vec2 no = domain.arc(c.arc_out).frame(0.0).normal;
        const bool in_q4 = ni.x > q && ni.y < -q;
        const bool out_q2 = no.x < -q && no.y > q;
        if (in_q4 && out_q2) {
            if (found) return std::nullopt;  // not unique
            found = c.position;
        }
    }
    return found;
}

} // namespace mixlap
