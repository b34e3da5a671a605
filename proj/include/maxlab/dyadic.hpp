#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "maxlab/geometry.hpp"

namespace maxlab {

/// [index * 2^level, (index + 1) * 2^level)
struct DyadicInterval {
    int level = 0;
    int index = 0;

    int begin() const { return index << level; }
    int end() const { return (index + 1) << level; }
    int length() const { return 1 << level; }

    bool contains(const DyadicInterval& o) const { return begin() <= o.begin() && o.end() <= end(); }
    bool intersects(const DyadicInterval& o) const { return begin() < o.end() && o.begin() < end(); }

    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Nested or disjoint: the result is one of the two inputs, or nothing.
std::optional<DyadicInterval> intersect(const DyadicInterval& a, const DyadicInterval& b);

/// Cartesian product of two dyadic intervals. When `long_side_x1` is set the
/// x1-projection is at least as long as the x2-projection.
class DyadicRect {
public:
    DyadicRect(DyadicInterval ix, DyadicInterval iy, bool long_side_x1 = true);

    const DyadicInterval& ix() const { return ix_; }
    const DyadicInterval& iy() const { return iy_; }
    bool long_side_x1() const { return long_side_x1_; }

    int p1_length() const { return ix_.length(); }
    int p2_length() const { return iy_.length(); }
    std::int64_t area() const { return std::int64_t(ix_.length()) * iy_.length(); }

    AxisRect to_axis() const { return AxisRect{ix_.begin(), ix_.end(), iy_.begin(), iy_.end()}; }
    bool fits(int side) const { return ix_.end() <= side && iy_.end() <= side; }

    friend bool operator==(const DyadicRect&, const DyadicRect&) = default;

private:
    DyadicInterval ix_;
    DyadicInterval iy_;
    bool long_side_x1_;
};

/// Every dyadic rectangle of a side x side grid, x-level major. With
/// `long_side_x1` only rectangles with |P1| >= |P2| are produced.
std::vector<DyadicRect> enumerate_dyadic_rects(int side, bool long_side_x1);

} // namespace maxlab
