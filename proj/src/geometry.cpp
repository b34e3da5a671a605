#include "maxlab/geometry.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "maxlab/error.hpp"

namespace maxlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normalize_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

} // namespace

RotatedRect::RotatedRect(Point center, double length, double width, double theta)
    : center_(center), length_(length), width_(width), theta_(normalize_angle(theta)) {
    if (!(length_ > 0.0) || !(width_ > 0.0) || !std::isfinite(length_) || !std::isfinite(width_)) {
        throw GeometryError("rotated rectangle needs positive finite sides (L=" + std::to_string(length) +
                            ", l=" + std::to_string(width) + ")");
    }
    if (width_ > length_) {
        throw GeometryError("rotated rectangle needs l <= L (L=" + std::to_string(length) +
                            ", l=" + std::to_string(width) + ")");
    }
    if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(theta)) {
        throw GeometryError("rotated rectangle needs a finite center and angle");
    }
    cos_ = std::cos(theta_);
    sin_ = std::sin(theta_);
}

std::array<Point, 4> RotatedRect::corners() const {
    const double hu = 0.5 * length_;
    const double hv = 0.5 * width_;
    const Point u{cos_ * hu, sin_ * hu};
    const Point v{-sin_ * hv, cos_ * hv};
    return {Point{center_.x - u.x - v.x, center_.y - u.y - v.y},
            Point{center_.x + u.x - v.x, center_.y + u.y - v.y},
            Point{center_.x + u.x + v.x, center_.y + u.y + v.y},
            Point{center_.x - u.x + v.x, center_.y - u.y + v.y}};
}

std::array<double, 4> RotatedRect::bounding_box() const {
    const double ex = 0.5 * (length_ * std::abs(cos_) + width_ * std::abs(sin_));
    const double ey = 0.5 * (length_ * std::abs(sin_) + width_ * std::abs(cos_));
    return {center_.x - ex, center_.x + ex, center_.y - ey, center_.y + ey};
}

Point RotatedRect::to_local(Point p) const {
    const double dx = p.x - center_.x;
    const double dy = p.y - center_.y;
    return {dx * cos_ + dy * sin_, -dx * sin_ + dy * cos_};
}

bool RotatedRect::contains(Point p, double tol) const {
    const Point q = to_local(p);
    return std::abs(q.x) <= 0.5 * length_ + tol && std::abs(q.y) <= 0.5 * width_ + tol;
}

RotatedRect from_axis_rect(const AxisRect& r) {
    const double w = r.width();
    const double h = r.height();
    const Point c{0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)};
    if (w >= h) return RotatedRect(c, w, h, 0.0);
    return RotatedRect(c, h, w, 0.5 * std::numbers::pi);
}

Polygon to_polygon(const RotatedRect& r) {
    Polygon p;
    const auto cs = r.corners();
    for (const auto& c : cs) p.v[p.n++] = c;
    return p;
}

Polygon clip_half_plane(const Polygon& poly, double a, double b, double c) {
    Polygon out;
    if (poly.n == 0) return out;
    for (int i = 0; i < poly.n; ++i) {
        const Point& p = poly.v[i];
        const Point& q = poly.v[(i + 1) % poly.n];
        const double dp = a * p.x + b * p.y - c;
        const double dq = a * q.x + b * q.y - c;
        const bool pin = dp <= 0.0;
        const bool qin = dq <= 0.0;
        if (pin) out.v[out.n++] = p;
        if (pin != qin) {
            const double t = dp / (dp - dq);
            out.v[out.n++] = Point{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        }
        if (out.n >= Polygon::kCapacity - 1) break;
    }
    if (out.n < 3) out.n = 0;
    return out;
}

Polygon clip_to_box(const Polygon& poly, double x0, double x1, double y0, double y1) {
    Polygon p = clip_half_plane(poly, -1.0, 0.0, -x0);
    p = clip_half_plane(p, 1.0, 0.0, x1);
    p = clip_half_plane(p, 0.0, -1.0, -y0);
    return clip_half_plane(p, 0.0, 1.0, y1);
}

double polygon_area(const Polygon& poly) {
    if (poly.n < 3) return 0.0;
    // Shoelace relative to the first vertex keeps cancellation small.
    const Point o = poly.v[0];
    double twice = 0.0;
    for (int i = 1; i + 1 < poly.n; ++i) {
        const double ax = poly.v[i].x - o.x;
        const double ay = poly.v[i].y - o.y;
        const double bx = poly.v[i + 1].x - o.x;
        const double by = poly.v[i + 1].y - o.y;
        twice += ax * by - ay * bx;
    }
    return 0.5 * std::abs(twice);
}

double area_in_box(const RotatedRect& r, double x0, double x1, double y0, double y1) {
    return polygon_area(clip_to_box(to_polygon(r), x0, x1, y0, y1));
}

double intersection_area(const RotatedRect& a, const RotatedRect& b) {
    Polygon p = to_polygon(a);
    const auto cs = b.corners();
    // b's corners are counterclockwise; inside is to the left of each edge.
    for (int i = 0; i < 4 && p.n > 0; ++i) {
        const Point& s = cs[i];
        const Point& e = cs[(i + 1) % 4];
        const double nx = e.y - s.y;
        const double ny = -(e.x - s.x);
        p = clip_half_plane(p, nx, ny, nx * s.x + ny * s.y);
    }
    return std::min(polygon_area(p), std::min(a.area(), b.area()));
}

RotatedRect expand_rect(const RotatedRect& r, double factor) {
    if (!(factor >= 1.0)) {
        throw GeometryError("expansion factor must be >= 1, got " + std::to_string(factor));
    }
    return RotatedRect(r.center(), r.length() * factor, r.width() * factor, r.theta());
}

double angular_diameter(std::span<const double> thetas) {
    if (thetas.size() < 2) return 0.0;
    std::vector<double> a;
    a.reserve(thetas.size());
    for (double t : thetas) a.push_back(normalize_angle(t));
    std::sort(a.begin(), a.end());
    double max_gap = a.front() + kTwoPi - a.back();
    for (std::size_t i = 1; i < a.size(); ++i) max_gap = std::max(max_gap, a[i] - a[i - 1]);
    return kTwoPi - max_gap;
}

} // namespace maxlab
