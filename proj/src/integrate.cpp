#include "maxlab/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace maxlab {

double integrate_rotated(const Grid2D& g, const RotatedRect& r) {
    const auto box = r.bounding_box();
    const int n = g.side();
    const int x0 = std::max(0, static_cast<int>(std::floor(box[0])));
    const int x1 = std::min(n, static_cast<int>(std::ceil(box[1])));
    const int y0 = std::max(0, static_cast<int>(std::floor(box[2])));
    const int y1 = std::min(n, static_cast<int>(std::ceil(box[3])));
    if (x0 >= x1 || y0 >= y1) return 0.0;

    const Polygon poly = to_polygon(r);
    double total = 0.0;
    for (int y = y0; y < y1; ++y) {
        // Clip to the row first so each cell clip starts from a smaller polygon.
        const Polygon row = clip_half_plane(clip_half_plane(poly, 0.0, -1.0, -double(y)), 0.0, 1.0, double(y + 1));
        if (row.n == 0) continue;
        for (int x = x0; x < x1; ++x) {
            const double v = g(x, y);
            if (v == 0.0) continue;
            const Polygon cell = clip_half_plane(clip_half_plane(row, -1.0, 0.0, -double(x)), 1.0, 0.0, double(x + 1));
            total += v * polygon_area(cell);
        }
    }
    return total;
}

} // namespace maxlab
