#include "maxlab/dyadic.hpp"

#include <string>

#include "maxlab/error.hpp"
#include "maxlab/grid.hpp"

namespace maxlab {

std::optional<DyadicInterval> intersect(const DyadicInterval& a, const DyadicInterval& b) {
    if (!a.intersects(b)) return std::nullopt;
    return a.level <= b.level ? a : b;
}

DyadicRect::DyadicRect(DyadicInterval ix, DyadicInterval iy, bool long_side_x1)
    : ix_(ix), iy_(iy), long_side_x1_(long_side_x1) {
    if (ix.level < 0 || iy.level < 0 || ix.index < 0 || iy.index < 0) {
        throw GeometryError("dyadic interval needs nonnegative level and index");
    }
    if (long_side_x1 && ix.length() < iy.length()) {
        throw OrientationError("dyadic rectangle has |P1| = " + std::to_string(ix.length()) + " < |P2| = " +
                               std::to_string(iy.length()));
    }
}

std::vector<DyadicRect> enumerate_dyadic_rects(int side, bool long_side_x1) {
    if (!is_power_of_two(side)) {
        throw GeometryError("grid side must be a power of two, got " + std::to_string(side));
    }
    const int top = log2_exact(side);
    std::vector<DyadicRect> out;
    for (int kx = 0; kx <= top; ++kx) {
        for (int ky = 0; ky <= top; ++ky) {
            if (long_side_x1 && kx < ky) continue;
            const int nx = side >> kx;
            const int ny = side >> ky;
            for (int jx = 0; jx < nx; ++jx) {
                for (int jy = 0; jy < ny; ++jy) {
                    out.emplace_back(DyadicInterval{kx, jx}, DyadicInterval{ky, jy}, long_side_x1);
                }
            }
        }
    }
    return out;
}

} // namespace maxlab
