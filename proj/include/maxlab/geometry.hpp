#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>

namespace maxlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Half-open integer cell range [x0, x1) x [y0, y1).
struct AxisRect {
    int x0 = 0;
    int x1 = 1;
    int y0 = 0;
    int y1 = 1;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool valid() const { return x0 < x1 && y0 < y1; }
    bool within(int side) const { return valid() && x0 >= 0 && y0 >= 0 && x1 <= side && y1 <= side; }

    friend bool operator==(const AxisRect&, const AxisRect&) = default;
};

/// Closed rectangle with its longer side of length `length` pointing at angle
/// `theta` from the x1-axis and shorter side `width`.
class RotatedRect {
public:
    RotatedRect(Point center, double length, double width, double theta);

    Point center() const { return center_; }
    double length() const { return length_; }
    double width() const { return width_; }
    double theta() const { return theta_; }
    double area() const { return length_ * width_; }

    /// Unit vector along the long side, and along the short side.
    Point axis_u() const { return {cos_, sin_}; }
    Point axis_v() const { return {-sin_, cos_}; }

    /// Counterclockwise corners.
    std::array<Point, 4> corners() const;

    /// Axis-aligned bounding box: {xmin, xmax, ymin, ymax}.
    std::array<double, 4> bounding_box() const;

    /// Closed containment with an absolute tolerance in the rectangle frame.
    bool contains(Point p, double tol = 1e-9) const;

    /// Local frame coordinates (u along the long side, v along the short
    /// side) of `p` relative to the center.
    Point to_local(Point p) const;

private:
    Point center_;
    double length_;
    double width_;
    double theta_;
    double cos_;
    double sin_;
};

RotatedRect from_axis_rect(const AxisRect& r);

/// Convex polygon with bounded vertex count, enough for a rectangle clipped by
/// eight half-planes.
struct Polygon {
    static constexpr int kCapacity = 16;
    std::array<Point, kCapacity> v{};
    int n = 0;
};

Polygon to_polygon(const RotatedRect& r);

/// Keeps the part of `poly` where a*x + b*y <= c.
Polygon clip_half_plane(const Polygon& poly, double a, double b, double c);

Polygon clip_to_box(const Polygon& poly, double x0, double x1, double y0, double y1);

double polygon_area(const Polygon& poly);

/// |r ∩ [x0,x1] x [y0,y1]|
double area_in_box(const RotatedRect& r, double x0, double x1, double y0, double y1);

/// |a ∩ b| via successive half-plane clipping of a against the edges of b.
double intersection_area(const RotatedRect& a, const RotatedRect& b);

/// Same center and angle, both sides scaled by `factor` (>= 1).
RotatedRect expand_rect(const RotatedRect& r, double factor = 5.0);

/// Smallest arc length containing every angle in `thetas` (radians, any
/// representative), in [0, 2*pi).
double angular_diameter(std::span<const double> thetas);

} // namespace maxlab
