#pragma once

#include <string>
#include <vector>

#include "maxlab/geometry.hpp"
#include "maxlab/grid.hpp"

namespace maxlab {

/// (side+1) x (side+1) cumulative sums; prefix(x, y) is the mass of
/// [0, x) x [0, y). Exact for integer grids.
template <class T>
class SummedAreaTable {
public:
    explicit SummedAreaTable(const BasicGrid<T>& g) : side_(g.side()), prefix_((side_ + 1) * (side_ + 1), T(0)) {
        const int w = side_ + 1;
        for (int y = 0; y < side_; ++y) {
            T row = T(0);
            for (int x = 0; x < side_; ++x) {
                row += g(x, y);
                prefix_[(y + 1) * w + (x + 1)] = prefix_[y * w + (x + 1)] + row;
            }
        }
    }

    int side() const { return side_; }

    T prefix(int x, int y) const { return prefix_[y * (side_ + 1) + x]; }

    /// Mass of [x0, x1) x [y0, y1); bounds are not checked.
    T sum(int x0, int x1, int y0, int y1) const {
        return prefix(x1, y1) - prefix(x0, y1) - prefix(x1, y0) + prefix(x0, y0);
    }

    T sum(const AxisRect& r) const { return sum(r.x0, r.x1, r.y0, r.y1); }

private:
    int side_;
    std::vector<T> prefix_;
};

inline void check_bounds(const AxisRect& r, int side) {
    if (!r.within(side)) {
        throw BoundsError("rectangle [" + std::to_string(r.x0) + "," + std::to_string(r.x1) + ")x[" +
                          std::to_string(r.y0) + "," + std::to_string(r.y1) + ") is not inside a grid of side " +
                          std::to_string(side));
    }
}

/// Unnormalized integral of g over r (sum of the covered cells).
template <class T>
T integrate(const BasicGrid<T>& g, const AxisRect& r) {
    check_bounds(r, g.side());
    T total = T(0);
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) total += g(x, y);
    return total;
}

template <class T>
T integrate(const SummedAreaTable<T>& sat, const AxisRect& r) {
    check_bounds(r, sat.side());
    return sat.sum(r);
}

/// Exact area-weighted integral of g over r: sum of value * |cell ∩ r| over
/// the cells in r's bounding box, by clipping r against each cell. g is taken
/// as zero outside the grid.
double integrate_rotated(const Grid2D& g, const RotatedRect& r);

} // namespace maxlab
