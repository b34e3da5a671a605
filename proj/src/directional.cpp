#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>

#include "maxlab/geometry.hpp"
#include "maxlab/integrate.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/parallel.hpp"

namespace maxlab {

DirectionSet::DirectionSet(int n_directions) : n_(n_directions), sectors_(8) {
    if (n_directions <= 10) {
        throw PreconditionError("direction set needs N > 10, got " + std::to_string(n_directions));
    }
    for (int j = 0; j < n_; ++j) sectors_[sector_of(j)].push_back(j);
}

double DirectionSet::angle(int j) const { return 2.0 * std::numbers::pi * j / n_; }

std::vector<std::pair<double, double>> DirectionSet::vectors() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) out.emplace_back(std::cos(angle(j)), std::sin(angle(j)));
    return out;
}

std::vector<int> DirectionSet::orientation_indices() const {
    std::vector<int> out;
    const int count = n_ % 2 == 0 ? n_ / 2 : n_;
    for (int j = 0; j < count; ++j) out.push_back(j);
    return out;
}

std::vector<ScalePair> default_scale_grid(int side) {
    std::vector<ScalePair> out;
    for (int len = 1; len <= side; len *= 2)
        for (int aspect = 1; aspect <= side && aspect <= len; aspect *= 2)
            out.push_back({double(len), double(len / aspect)});
    return out;
}

std::string describe_scales(std::span<const ScalePair> scales) {
    std::ostringstream os;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (i) os << ',';
        os << format_number(scales[i].length) << ':' << format_number(scales[i].width);
    }
    return os.str();
}

std::vector<ScalePair> parse_scales(const std::string& text) {
    std::vector<ScalePair> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("scale pair '" + item + "' is not of the form L:l");
        try {
            out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ParseError("scale pair '" + item + "' is not numeric");
        }
    }
    if (out.empty()) throw ParseError("empty scale grid");
    return out;
}

namespace {

constexpr double kContainTol = 1e-9;
constexpr int kDyadicBits = 20;
constexpr std::int64_t kMaxLatticeNodes = std::int64_t(1) << 24;

std::int64_t dyadic_units(double v) {
    const double scaled = std::ldexp(v, kDyadicBits);
    const double r = std::round(scaled);
    if (!(r >= 1.0) || std::abs(scaled - r) > 1e-6) {
        throw GeometryError("scale value " + format_number(v) + " is not a multiple of 2^-" +
                            std::to_string(kDyadicBits));
    }
    return static_cast<std::int64_t>(r);
}

// Cell pieces of the rotated square of side s centered at c (frame cos, sin):
// (cell index, area of the overlap) for every grid cell it meets.
void square_pieces(int n, Point c, double s, double cs, double sn, std::vector<std::pair<std::int32_t, double>>& out) {
    const double ext = 0.5 * s * (std::abs(cs) + std::abs(sn));
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - ext)));
    const int x1 = std::min(n, static_cast<int>(std::ceil(c.x + ext)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - ext)));
    const int y1 = std::min(n, static_cast<int>(std::ceil(c.y + ext)));
    if (x0 >= x1 || y0 >= y1) return;
    if (x1 - x0 == 1 && y1 - y0 == 1 && c.x - ext >= x0 && c.x + ext <= x1 && c.y - ext >= y0 && c.y + ext <= y1) {
        out.emplace_back(y0 * n + x0, s * s);
        return;
    }
    Polygon poly;
    const double hu = 0.5 * s;
    const Point u{cs * hu, sn * hu};
    const Point v{-sn * hu, cs * hu};
    poly.v[0] = {c.x - u.x - v.x, c.y - u.y - v.y};
    poly.v[1] = {c.x + u.x - v.x, c.y + u.y - v.y};
    poly.v[2] = {c.x + u.x + v.x, c.y + u.y + v.y};
    poly.v[3] = {c.x - u.x + v.x, c.y - u.y + v.y};
    poly.n = 4;
    for (int y = y0; y < y1; ++y) {
        const Polygon row = clip_half_plane(clip_half_plane(poly, 0.0, -1.0, -double(y)), 0.0, 1.0, double(y + 1));
        if (row.n == 0) continue;
        for (int x = x0; x < x1; ++x) {
            const double a =
                polygon_area(clip_half_plane(clip_half_plane(row, -1.0, 0.0, -double(x)), 1.0, 0.0, double(x + 1)));
            if (a > 0.0) out.emplace_back(y * n + x, a);
        }
    }
}

struct LatticeScale {
    std::int64_t len;     // L / step
    std::int64_t wid;     // l / step
    std::int64_t stride;  // l / (2 refinement) / step
    double area;
};

std::int64_t floor_div(double a, std::int64_t b) { return static_cast<std::int64_t>(std::floor(a / double(b))); }
std::int64_t ceil_div(double a, std::int64_t b) { return static_cast<std::int64_t>(std::ceil(a / double(b))); }

} // namespace

// Lattice s*Z^2 in the frame (u, v) = (x cos + y sin, -x sin + y cos). Node
// (i, j) of the cumulative table holds the mass of {u < i*s, v < j*s}; the
// table is built from the pieces of every lattice square.
struct DirectionalPlan::Orientation {
    double cs = 1.0;
    double sn = 0.0;
    std::int64_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
    std::vector<std::uint32_t> offsets;  // square (i, j) -> pieces[offsets[k], offsets[k + 1])
    std::vector<std::pair<std::int32_t, double>> pieces;
    std::vector<double> cu, cv;  // cell centers in lattice units
    double umin = 0, umax = 0, vmin = 0, vmax = 0;

    Point to_frame(Point p) const { return {p.x * cs + p.y * sn, -p.x * sn + p.y * cs}; }
    Point from_frame(double u, double v) const { return {u * cs - v * sn, u * sn + v * cs}; }
};

struct DirectionalPlan::Impl {
    int side = 1;
    int N = 0;
    int refinement = 1;
    double step = 1.0;
    std::string scales;
    std::vector<LatticeScale> lattice;
    std::vector<Orientation> orientations;
};

namespace {

DirectionalPlan::Orientation build_orientation(int n, double theta, double step) {
    DirectionalPlan::Orientation o;
    o.cs = std::cos(theta);
    o.sn = std::sin(theta);
    // Snap the axis-aligned orientations so the lattice lines up with cells.
    if (std::abs(o.cs) < 1e-15) o.cs = 0.0;
    if (std::abs(o.sn) < 1e-15) o.sn = 0.0;
    const double side = n;
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const Point p : {Point{0, 0}, Point{side, 0}, Point{0, side}, Point{side, side}}) {
        const Point q = o.to_frame(p);
        umin = std::min(umin, q.x);
        umax = std::max(umax, q.x);
        vmin = std::min(vmin, q.y);
        vmax = std::max(vmax, q.y);
    }
    o.i0 = static_cast<std::int64_t>(std::floor(umin / step - 1e-9));
    o.i1 = static_cast<std::int64_t>(std::ceil(umax / step + 1e-9));
    o.j0 = static_cast<std::int64_t>(std::floor(vmin / step - 1e-9));
    o.j1 = static_cast<std::int64_t>(std::ceil(vmax / step + 1e-9));
    if ((o.i1 - o.i0 + 1) * (o.j1 - o.j0 + 1) > kMaxLatticeNodes) {
        throw GeometryError("scale grid too fine for the translation lattice (step " + format_number(step) + ")");
    }
    o.offsets.push_back(0);
    for (std::int64_t j = o.j0; j < o.j1; ++j) {
        for (std::int64_t i = o.i0; i < o.i1; ++i) {
            square_pieces(n, o.from_frame((double(i) + 0.5) * step, (double(j) + 0.5) * step), step, o.cs, o.sn,
                          o.pieces);
            o.offsets.push_back(static_cast<std::uint32_t>(o.pieces.size()));
        }
    }

    o.cu.resize(static_cast<std::size_t>(n) * n);
    o.cv.resize(o.cu.size());
    o.umin = o.vmin = 1e300;
    o.umax = o.vmax = -1e300;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const Point q = o.to_frame({x + 0.5, y + 0.5});
            const std::size_t k = static_cast<std::size_t>(y) * n + x;
            o.cu[k] = q.x / step;
            o.cv[k] = q.y / step;
            o.umin = std::min(o.umin, o.cu[k]);
            o.umax = std::max(o.umax, o.cu[k]);
            o.vmin = std::min(o.vmin, o.cv[k]);
            o.vmax = std::max(o.vmax, o.cv[k]);
        }
    }
    return o;
}

void orientation_max(const Grid2D& g, const DirectionalPlan::Orientation& o, const std::vector<LatticeScale>& scales,
                     double step, std::vector<double>& best) {
    const std::int64_t width = o.i1 - o.i0 + 1;
    std::vector<double> prefix(static_cast<std::size_t>(width * (o.j1 - o.j0 + 1)), 0.0);
    auto at = [&](std::int64_t i, std::int64_t j) -> double& {
        return prefix[static_cast<std::size_t>((j - o.j0) * width + (i - o.i0))];
    };
    const auto& cells = g.cells();
    std::size_t sq = 0;
    for (std::int64_t j = o.j0; j < o.j1; ++j) {
        double row = 0.0;
        for (std::int64_t i = o.i0; i < o.i1; ++i, ++sq) {
            double m = 0.0;
            for (std::uint32_t k = o.offsets[sq]; k < o.offsets[sq + 1]; ++k)
                m += cells[static_cast<std::size_t>(o.pieces[k].first)] * o.pieces[k].second;
            row += m;
            at(i + 1, j + 1) = at(i + 1, j) + row;
        }
    }
    auto node = [&](std::int64_t i, std::int64_t j) {
        return at(std::clamp(i, o.i0, o.i1), std::clamp(j, o.j0, o.j1));
    };

    const double eps = kContainTol / step;
    std::vector<double> avg;
    for (const auto& sc : scales) {
        // Positions p place the rectangle at u in [p*stride, p*stride + len].
        const std::int64_t pu_lo = ceil_div(o.umin - sc.len - eps, sc.stride);
        const std::int64_t pu_hi = floor_div(o.umax + eps, sc.stride);
        const std::int64_t pv_lo = ceil_div(o.vmin - sc.wid - eps, sc.stride);
        const std::int64_t pv_hi = floor_div(o.vmax + eps, sc.stride);
        const std::int64_t nu = pu_hi - pu_lo + 1;
        const std::int64_t nv = pv_hi - pv_lo + 1;
        avg.assign(static_cast<std::size_t>(nu * nv), 0.0);
        for (std::int64_t pv = pv_lo; pv <= pv_hi; ++pv) {
            const std::int64_t c = pv * sc.stride, d = c + sc.wid;
            for (std::int64_t pu = pu_lo; pu <= pu_hi; ++pu) {
                const std::int64_t a = pu * sc.stride, b = a + sc.len;
                avg[static_cast<std::size_t>((pv - pv_lo) * nu + (pu - pu_lo))] =
                    (node(b, d) - node(a, d) - node(b, c) + node(a, c)) / sc.area;
            }
        }
        for (std::size_t k = 0; k < o.cu.size(); ++k) {
            const std::int64_t u_lo = ceil_div(o.cu[k] - sc.len - eps, sc.stride);
            const std::int64_t u_hi = floor_div(o.cu[k] + eps, sc.stride);
            const std::int64_t v_lo = ceil_div(o.cv[k] - sc.wid - eps, sc.stride);
            const std::int64_t v_hi = floor_div(o.cv[k] + eps, sc.stride);
            double m = best[k];
            for (std::int64_t pv = v_lo; pv <= v_hi; ++pv) {
                const double* row = avg.data() + (pv - pv_lo) * nu;
                for (std::int64_t pu = u_lo; pu <= u_hi; ++pu) m = std::max(m, row[pu - pu_lo]);
            }
            best[k] = m;
        }
    }
}

} // namespace

DirectionalPlan::DirectionalPlan(int side, const DirectionSet& dirs, std::span<const ScalePair> scales, int refinement) {
    if (!is_power_of_two(side)) throw GeometryError("grid side must be a power of two, got " + std::to_string(side));
    if (refinement < 1 || !is_power_of_two(refinement)) {
        throw GeometryError("translation refinement must be a power of two, got " + std::to_string(refinement));
    }
    if (scales.empty()) throw GeometryError("directional maximal operator needs a non-empty scale grid");
    std::int64_t unit = 0;
    for (const auto& sp : scales) {
        if (!(sp.width > 0.0) || !(sp.length > 0.0)) {
            throw GeometryError("scale pair needs positive sides (L=" + format_number(sp.length) +
                                ", l=" + format_number(sp.width) + ")");
        }
        if (sp.width > sp.length) {
            throw GeometryError("scale pair needs l <= L (L=" + format_number(sp.length) + ", l=" +
                                format_number(sp.width) + ")");
        }
        unit = std::gcd(unit, dyadic_units(sp.length));
        unit = std::gcd(unit, dyadic_units(0.5 * sp.width / refinement));
    }
    auto impl = std::make_shared<Impl>();
    impl->side = side;
    impl->N = dirs.size();
    impl->refinement = refinement;
    impl->step = std::ldexp(double(unit), -kDyadicBits);
    impl->scales = describe_scales(scales);
    for (const auto& sp : scales) {
        const std::int64_t stride = dyadic_units(0.5 * sp.width / refinement) / unit;
        impl->lattice.push_back({dyadic_units(sp.length) / unit, 2 * refinement * stride, stride, sp.length * sp.width});
    }
    const auto indices = dirs.orientation_indices();
    impl->orientations.resize(indices.size());
    parallel_for(indices.size(), [&](std::size_t o) {
        impl->orientations[o] = build_orientation(side, dirs.angle(indices[o]), impl->step);
    });
    impl_ = std::move(impl);
}

int DirectionalPlan::side() const { return impl_->side; }

MaximalField DirectionalPlan::apply(const Grid2D& g) const {
    const Impl& p = *impl_;
    if (g.side() != p.side) {
        throw BoundsError("plan built for side " + std::to_string(p.side) + ", grid has side " + std::to_string(g.side()));
    }
    const int n = p.side;
    std::vector<std::vector<double>> partial(p.orientations.size());
    parallel_for(p.orientations.size(), [&](std::size_t o) {
        partial[o].assign(static_cast<std::size_t>(n) * n, 0.0);
        orientation_max(g, p.orientations[o], p.lattice, p.step, partial[o]);
    });
    std::vector<double> best(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& part : partial)
        for (std::size_t k = 0; k < best.size(); ++k) best[k] = std::max(best[k], part[k]);

    return {OperatorKind::Directional,
            {{"operator", to_string(OperatorKind::Directional)},
             {"side", std::to_string(n)},
             {"N", std::to_string(p.N)},
             {"scales", p.scales},
             {"translation_stride", p.refinement == 1 ? std::string("l/2") : "l/" + std::to_string(2 * p.refinement)}},
            Grid2D(n, std::move(best))};
}

MaximalField directional_maximal(const Grid2D& g, const DirectionSet& dirs, std::span<const ScalePair> scales,
                                 int refinement) {
    return DirectionalPlan(g.side(), dirs, scales, refinement).apply(g);
}

} // namespace maxlab
