#include "maxlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "maxlab/error.hpp"
#include "maxlab/grid_io.hpp"
#include "maxlab/maximal.hpp"

namespace maxlab {

namespace {

using ojson = nlohmann::ordered_json;

std::string describe(const DyadicRect& r) {
    const AxisRect a = r.to_axis();
    std::ostringstream os;
    os << '[' << a.x0 << ',' << a.x1 << ")x[" << a.y0 << ',' << a.y1 << ')';
    return os.str();
}

std::vector<std::size_t> stable_order(std::size_t n, auto&& key_greater) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), key_greater);
    return order;
}

// Counts cells of r already set in mask.
std::int64_t mask_overlap(const std::vector<std::uint8_t>& mask, int side, const AxisRect& r) {
    std::int64_t c = 0;
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) c += mask[static_cast<std::size_t>(y) * side + x];
    return c;
}

void mask_fill(std::vector<std::uint8_t>& mask, int side, const AxisRect& r) {
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) mask[static_cast<std::size_t>(y) * side + x] = 1;
}

// overlap < threshold * area, exactly.
bool below_threshold(std::int64_t overlap, std::int64_t area, const Fraction& threshold) {
    return static_cast<__int128>(overlap) * threshold.den() < static_cast<__int128>(threshold.num()) * area;
}

} // namespace

DyadicSelection select_dyadic(const std::vector<DyadicRect>& family, int side, Fraction threshold) {
    if (family.empty()) throw PreconditionError("dyadic selection needs a non-empty family");
    if (!is_power_of_two(side)) throw BoundsError("grid side must be a power of two");
    for (const auto& r : family) {
        if (r.p1_length() < r.p2_length()) throw OrientationError("rectangle " + describe(r) + " has |P1| < |P2|");
        if (!r.fits(side)) throw BoundsError("rectangle " + describe(r) + " leaves the grid");
    }
    DyadicSelection sel;
    sel.side = side;
    sel.threshold = threshold;
    sel.input = family;
    sel.order = stable_order(family.size(),
                             [&](std::size_t a, std::size_t b) { return family[a].p1_length() > family[b].p1_length(); });

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(side) * side, 0);
    for (const std::size_t idx : sel.order) {
        const AxisRect r = family[idx].to_axis();
        DyadicStep step{idx, mask_overlap(mask, side, r), r.area(), false};
        step.selected = below_threshold(step.overlap, step.area, threshold);
        if (step.selected) {
            mask_fill(mask, side, r);
            sel.selected.push_back(idx);
        }
        sel.trace.push_back(step);
    }
    return sel;
}

CheckReport check_dyadic_certificates(const DyadicSelection& sel) {
    CheckReport rep{"selection-certificates", true, 0, {}, {}};
    const int n = sel.side;
    // Recompute the union of kept rectangles preceding each candidate from the
    // kept list, independently of the trace.
    std::vector<bool> kept(sel.input.size(), false);
    for (std::size_t i : sel.selected) kept[i] = true;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    int prev_p1 = std::numeric_limits<int>::max();
    std::size_t sel_pos = 0;
    for (std::size_t pos = 0; pos < sel.order.size(); ++pos) {
        const std::size_t idx = sel.order[pos];
        const DyadicRect& R = sel.input[idx];
        ++rep.checked;
        if (R.p1_length() > prev_p1) {
            rep.passed = false;
            rep.witness = "order at " + describe(R);
            return rep;
        }
        prev_p1 = R.p1_length();
        const AxisRect r = R.to_axis();
        std::int64_t overlap = 0;
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) overlap += mask[static_cast<std::size_t>(y) * n + x] ? 1 : 0;
        const bool ok_kept = below_threshold(overlap, r.area(), sel.threshold);
        if (kept[idx] != ok_kept) {
            rep.passed = false;
            rep.witness = describe(R) + (kept[idx] ? " kept with overlap " : " rejected with overlap ") +
                          std::to_string(overlap) + "/" + std::to_string(r.area());
            return rep;
        }
        if (kept[idx]) {
            if (sel_pos >= sel.selected.size() || sel.selected[sel_pos] != idx) {
                rep.passed = false;
                rep.witness = "selection order at " + describe(R);
                return rep;
            }
            ++sel_pos;
            mask_fill(mask, n, r);
        }
    }
    rep.detail = std::to_string(sel.selected.size()) + " of " + std::to_string(sel.input.size()) + " kept";
    return rep;
}

CheckReport check_covering_inclusion(const DyadicSelection& sel) {
    CheckReport rep{"covering-inclusion", true, 0, {}, {}};
    const int n = sel.side;
    IntGrid indicator(n);
    for (std::size_t i : sel.selected) {
        const AxisRect r = sel.input[i].to_axis();
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) indicator.set(x, y, 1);
    }
    const auto m = hl_maximal_values(indicator, true);
    Fraction worst(1);
    for (const auto& R : sel.input) {
        const AxisRect r = R.to_axis();
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) {
                ++rep.checked;
                worst = std::min(worst, m(x, y));
                if (m(x, y) < sel.threshold && rep.passed) {
                    rep.passed = false;
                    rep.witness = "cell (" + std::to_string(x) + "," + std::to_string(y) + ") of " + describe(R);
                }
            }
    }
    std::ostringstream os;
    os << "min dyadic average " << Fraction(worst.num(), worst.den());
    rep.detail = os.str();
    return rep;
}

CheckReport multiplicity_bound_check(const DyadicSelection& sel) {
    CheckReport rep{"multiplicity-bound", true, 0, {}, {}};
    const int n = sel.side;
    std::vector<int> mult(static_cast<std::size_t>(n) * n, 0);
    int max_mult = 0;
    std::vector<std::int64_t> hist;
    for (std::size_t pos = 0; pos < sel.selected.size(); ++pos) {
        const DyadicRect& R = sel.input[sel.selected[pos]];
        const AxisRect r = R.to_axis();
        hist.assign(pos + 2, 0);
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) {
                int& m = mult[static_cast<std::size_t>(y) * n + x];
                ++m;
                ++hist[m];
                max_mult = std::max(max_mult, m);
            }
        // X_{i,n} = cells of R_i with multiplicity >= n among R_1..R_i.
        std::int64_t at_least = 0;
        for (std::size_t level = hist.size() - 1; level >= 1; --level) {
            at_least += hist[level];
            ++rep.checked;
            // |X| * 3^(level-1) <= |R|; 3^40 dwarfs any grid area.
            __int128 scaled = at_least;
            for (std::size_t e = 1; e < level && scaled <= R.area(); ++e) scaled *= 3;
            if (scaled > R.area()) {
                rep.passed = false;
                rep.witness = describe(R) + " n=" + std::to_string(level) + " |X|=" + std::to_string(at_least);
                return rep;
            }
        }
    }
    rep.detail = "max multiplicity " + std::to_string(max_mult);
    return rep;
}

CheckReport check_structural_fact(const DyadicSelection& sel) {
    CheckReport rep{"structural-fact", true, 0, {}, {}};
    for (std::size_t k = 0; k < sel.selected.size(); ++k) {
        const DyadicRect& Rk = sel.input[sel.selected[k]];
        for (std::size_t j = 0; j < k; ++j) {
            const DyadicRect& Rj = sel.input[sel.selected[j]];
            if (!Rk.ix().intersects(Rj.ix()) || !Rk.iy().intersects(Rj.iy())) continue;
            ++rep.checked;
            const auto p2 = intersect(Rk.iy(), Rj.iy());
            const bool product = Rj.ix().contains(Rk.ix()) && p2 && *p2 == Rj.iy();
            const bool thin = p2 && 3 * p2->length() < Rk.iy().length();
            if (!product || !thin) {
                rep.passed = false;
                rep.witness = describe(Rk) + " meets " + describe(Rj);
                return rep;
            }
        }
    }
    return rep;
}

MultiplicityField multiplicity_field(const DyadicSelection& sel, const Grid2D& U) {
    const int n = sel.side;
    if (U.side() != n) throw BoundsError("base weight side differs from the selection grid");
    MultiplicityField out{Grid2D(n), IntGrid(n)};
    for (std::size_t i : sel.selected) {
        const AxisRect r = sel.input[i].to_axis();
        double mass = 0.0;
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) mass += U(x, y);
        const double density = mass / static_cast<double>(r.area());
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) {
                out.mu.set(x, y, out.mu(x, y) + density);
                out.count.set(x, y, out.count(x, y) + 1);
            }
    }
    return out;
}

std::vector<DyadicRect> random_dyadic_family(Rng& rng, int side, int count) {
    const int top = log2_exact(side);
    std::vector<DyadicRect> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int lx = static_cast<int>(rng.uniform_int(0, top));
        const int ly = static_cast<int>(rng.uniform_int(0, lx));
        const int jx = static_cast<int>(rng.uniform_int(0, (side >> lx) - 1));
        const int jy = static_cast<int>(rng.uniform_int(0, (side >> ly) - 1));
        out.emplace_back(DyadicInterval{lx, jx}, DyadicInterval{ly, jy});
    }
    return out;
}

std::vector<DyadicRect> nested_column_family(int side) {
    const int top = log2_exact(side);
    std::vector<DyadicRect> out;
    for (int lx = top; lx >= 0; --lx)
        for (int ly = 0; ly <= lx; ++ly)
            for (int jy = 0; jy < std::min(side >> ly, 4); ++jy) out.emplace_back(DyadicInterval{lx, 0}, DyadicInterval{ly, jy});
    return out;
}

// ---- directional ----

namespace {

double orientation_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
}

void check_sector(const std::vector<RotatedRect>& family) {
    std::vector<double> thetas;
    for (const auto& r : family) thetas.push_back(r.theta());
    const double diam = angular_diameter(thetas);
    if (diam > std::numbers::pi / 4 + 1e-12) {
        throw SectorError("family directions span " + format_number(diam) + " rad, more than pi/4");
    }
}

} // namespace

DirectionalSelection select_directional(const std::vector<RotatedRect>& family, double threshold) {
    if (family.empty()) throw PreconditionError("directional selection needs a non-empty family");
    check_sector(family);
    DirectionalSelection sel;
    sel.threshold = threshold;
    sel.input = family;
    sel.order = stable_order(family.size(),
                             [&](std::size_t a, std::size_t b) { return family[a].length() > family[b].length(); });
    for (const std::size_t idx : sel.order) {
        const RotatedRect& R = family[idx];
        DirectionalStep step{idx, 0.0, R.area(), false};
        for (std::size_t k : sel.selected) step.overlap_sum += intersection_area(family[k], R);
        step.selected = step.overlap_sum < threshold * step.area - kAreaTolerance;
        if (step.selected) sel.selected.push_back(idx);
        sel.trace.push_back(step);
    }
    return sel;
}

CheckReport check_directional_certificates(const DirectionalSelection& sel) {
    CheckReport rep{"selection-certificates", true, 0, {}, {}};
    std::vector<bool> kept(sel.input.size(), false);
    for (std::size_t i : sel.selected) kept[i] = true;
    std::vector<std::size_t> before;
    double prev_len = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const std::size_t idx : sel.order) {
        const RotatedRect& R = sel.input[idx];
        ++rep.checked;
        if (R.length() > prev_len) {
            rep.passed = false;
            rep.witness = "order at input " + std::to_string(idx);
            return rep;
        }
        prev_len = R.length();
        double sum = 0.0;
        for (std::size_t k : before) sum += intersection_area(R, sel.input[k]);
        const double bound = sel.threshold * R.area();
        if (kept[idx]) {
            worst = std::max(worst, sum / bound);
            if (sum > bound * (1 + 1e-9)) {
                rep.passed = false;
                rep.witness = "kept input " + std::to_string(idx) + " with overlap sum " + format_number(sum);
                return rep;
            }
            before.push_back(idx);
        } else if (sum < bound - kAreaTolerance - 1e-9 * bound) {
            rep.passed = false;
            rep.witness = "rejected input " + std::to_string(idx) + " with overlap sum " + format_number(sum);
            return rep;
        }
    }
    rep.detail = std::to_string(sel.selected.size()) + " of " + std::to_string(sel.input.size()) +
                 " kept, max kept overlap ratio " + format_number(worst);
    return rep;
}

IntGrid build_Y(const DirectionalSelection& sel, int side) {
    IntGrid Y(side);
    for (std::size_t i : sel.selected) {
        const RotatedRect e = expand_rect(sel.input[i], sel.expansion);
        const auto [x0, x1, y0, y1] = e.bounding_box();
        const int cx0 = std::max(0, static_cast<int>(std::floor(x0 - 0.5)));
        const int cx1 = std::min(side - 1, static_cast<int>(std::ceil(x1 - 0.5)));
        const int cy0 = std::max(0, static_cast<int>(std::floor(y0 - 0.5)));
        const int cy1 = std::min(side - 1, static_cast<int>(std::ceil(y1 - 0.5)));
        for (int y = cy0; y <= cy1; ++y)
            for (int x = cx0; x <= cx1; ++x)
                if (e.contains({x + 0.5, y + 0.5})) Y.set(x, y, Y(x, y) + 1);
    }
    return Y;
}

DirectionalCoveringReport check_directional_covering(const DirectionalSelection& sel, int side, int N) {
    DirectionalCoveringReport rep;
    rep.N = N;
    const auto mq = hl_maximal_values(build_Y(sel, side), false);
    Fraction worst(std::numeric_limits<std::int64_t>::max());
    for (const auto& R : sel.input) {
        const auto [x0, x1, y0, y1] = R.bounding_box();
        const int cx0 = std::max(0, static_cast<int>(std::floor(x0 - 0.5)));
        const int cx1 = std::min(side - 1, static_cast<int>(std::ceil(x1 - 0.5)));
        const int cy0 = std::max(0, static_cast<int>(std::floor(y0 - 0.5)));
        const int cy1 = std::min(side - 1, static_cast<int>(std::ceil(y1 - 0.5)));
        for (int y = cy0; y <= cy1; ++y)
            for (int x = cx0; x <= cx1; ++x) {
                if (!R.contains({x + 0.5, y + 0.5})) continue;
                ++rep.cells_checked;
                if (mq(x, y) < worst) {
                    worst = mq(x, y);
                    rep.witness_x = x;
                    rep.witness_y = y;
                }
            }
    }
    if (rep.cells_checked > 0) {
        rep.min_mq_y = worst.to_double();
        rep.min_scaled = rep.min_mq_y * std::log(double(N));
    }
    return rep;
}

namespace {

ScalePair pick_scale(Rng& rng, const std::vector<ScalePair>& grid, double min_len, double max_len) {
    std::vector<ScalePair> ok;
    for (const auto& s : grid)
        if (s.length >= min_len && s.length <= max_len) ok.push_back(s);
    return ok[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(ok.size()) - 1))];
}

int pick_direction(Rng& rng, const std::vector<int>& sector) {
    return sector[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(sector.size()) - 1))];
}

} // namespace

std::vector<RotatedRect> random_directional_family(Rng& rng, int side, int N, int count) {
    const DirectionSet dirs(N);
    const auto& sector = dirs.sectors()[static_cast<std::size_t>(rng.uniform_int(0, 7))];
    const auto scales = default_scale_grid(side);
    std::vector<RotatedRect> out;
    for (int i = 0; i < count; ++i) {
        const int j = pick_direction(rng, sector);
        const ScalePair s = pick_scale(rng, scales, 1.0, side / 2.0);
        const Point c{rng.uniform(side / 4.0, 3.0 * side / 4.0), rng.uniform(side / 4.0, 3.0 * side / 4.0)};
        out.emplace_back(c, s.length, s.width, dirs.angle(j));
    }
    return out;
}

Lemma31Result check_lemma31(const Lemma31Instance& inst, int samples) {
    Lemma31Result res;
    const RotatedRect& a = inst.alpha;
    const RotatedRect& b = inst.beta;
    res.angle = orientation_gap(a.theta(), b.theta());
    res.M = static_cast<int>(std::floor(std::log(inst.N / 8.0) / std::log(2.0) + 1e-12));
    // Bucket k: omega_k <= angle < omega_{k+1}, omega_0 = 0, omega_k = 2 pi 2^k / N.
    const double r = res.angle * inst.N / (2.0 * std::numbers::pi);
    res.k = r < 2.0 - 1e-9 ? 0 : static_cast<int>(std::floor(std::log2(r) + 1e-9));
    if (res.k >= res.M) {
        res.reason = "angle bucket k=" + std::to_string(res.k) + " not below M=" + std::to_string(res.M);
        return res;
    }
    if (b.length() < a.length()) {
        res.reason = "L_beta < L_alpha";
        return res;
    }
    res.hypothesis_met = true;
    res.omega_k = res.k == 0 ? 0.0 : 2.0 * std::numbers::pi * std::ldexp(1.0, res.k) / inst.N;
    res.s_alpha = 8.0 * std::max(a.width(), res.omega_k * a.length());
    res.lhs = intersection_area(b, a) / a.area();

    const RotatedRect star = expand_rect(b, 5.0);
    const Point u = a.axis_u(), v = a.axis_v(), c = a.center();
    res.rhs_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < samples; ++j) {
            const double s = ((i + 0.5) / samples - 0.5) * a.length();
            const double t = ((j + 0.5) / samples - 0.5) * a.width();
            const Point x{c.x + s * u.x + t * v.x, c.y + s * u.y + t * v.y};
            const RotatedRect Q(x, res.s_alpha, res.s_alpha, a.theta());
            const double rhs = intersection_area(star, Q) / Q.area();
            if (rhs < res.rhs_min) {
                res.rhs_min = rhs;
                res.worst_x = x;
            }
        }
    }
    res.passed = res.lhs <= 32.0 * res.rhs_min + 1e-9;
    return res;
}

Lemma31Instance random_lemma31_instance(Rng& rng, int N, int side) {
    const DirectionSet dirs(N);
    const auto& sector = dirs.sectors()[static_cast<std::size_t>(rng.uniform_int(0, 7))];
    const auto scales = default_scale_grid(side);
    const ScalePair sa = pick_scale(rng, scales, 1.0, side / 2.0);
    const ScalePair sb = pick_scale(rng, scales, sa.length, side);
    const double ta = dirs.angle(pick_direction(rng, sector));
    const double tb = dirs.angle(pick_direction(rng, sector));
    const RotatedRect alpha({rng.uniform(side / 4.0, 3.0 * side / 4.0), rng.uniform(side / 4.0, 3.0 * side / 4.0)},
                            sa.length, sa.width, ta);
    // A point of R_alpha, then R_beta placed so that it contains that point.
    const Point ua = alpha.axis_u(), va = alpha.axis_v();
    const double pa = rng.uniform(-0.5, 0.5) * sa.length, pb = rng.uniform(-0.5, 0.5) * sa.width;
    const Point p{alpha.center().x + pa * ua.x + pb * va.x, alpha.center().y + pa * ua.y + pb * va.y};
    const RotatedRect probe(p, sb.length, sb.width, tb);
    const Point ub = probe.axis_u(), vb = probe.axis_v();
    const double qa = rng.uniform(-0.5, 0.5) * sb.length, qb = rng.uniform(-0.5, 0.5) * sb.width;
    const RotatedRect beta({p.x + qa * ub.x + qb * vb.x, p.y + qa * ub.y + qb * vb.y}, sb.length, sb.width, tb);
    return {alpha, beta, N};
}

// ---- serialization ----

std::string family_to_json(const std::vector<DyadicRect>& family, int side) {
    ojson j;
    j["side"] = side;
    j["rects"] = ojson::array();
    for (const auto& r : family) {
        const AxisRect a = r.to_axis();
        j["rects"].push_back({a.x0, a.x1, a.y0, a.y1});
    }
    return j.dump();
}

std::string family_to_json(const std::vector<RotatedRect>& family, int side, int N) {
    ojson j;
    j["side"] = side;
    j["N"] = N;
    j["rects"] = ojson::array();
    for (const auto& r : family) {
        ojson e;
        e["cx"] = round12(r.center().x);
        e["cy"] = round12(r.center().y);
        e["L"] = round12(r.length());
        e["l"] = round12(r.width());
        e["theta"] = round12(r.theta());
        j["rects"].push_back(e);
    }
    return j.dump();
}

namespace {

DyadicInterval to_dyadic(int lo, int hi, const char* axis) {
    const int len = hi - lo;
    if (len <= 0 || !is_power_of_two(len) || lo < 0 || lo % len != 0) {
        throw ParseError(std::string("interval [") + std::to_string(lo) + "," + std::to_string(hi) + ") on " + axis +
                         " is not dyadic");
    }
    return {log2_exact(len), lo / len};
}

} // namespace

DyadicFamilyFile parse_dyadic_family(const std::string& text) {
    DyadicFamilyFile out;
    std::vector<std::array<int, 4>> raw;
    try {
        const auto j = nlohmann::json::parse(text);
        out.side = j.at("side").get<int>();
        for (const auto& r : j.at("rects")) {
            if (!r.is_array() || r.size() != 4) throw ParseError("dyadic rectangle must be [x0, x1, y0, y1]");
            raw.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed dyadic family: ") + e.what());
    }
    if (!is_power_of_two(out.side)) throw ParseError("family side must be a power of two");
    if (raw.empty()) throw ParseError("family has no rectangles");
    for (const auto& r : raw) {
        DyadicRect d(to_dyadic(r[0], r[1], "x1"), to_dyadic(r[2], r[3], "x2"), true);
        if (!d.fits(out.side)) throw BoundsError("rectangle " + describe(d) + " leaves the grid");
        out.rects.push_back(d);
    }
    return out;
}

DirectionalFamilyFile parse_directional_family(const std::string& text) {
    DirectionalFamilyFile out;
    try {
        const auto j = nlohmann::json::parse(text);
        out.side = j.at("side").get<int>();
        out.N = j.at("N").get<int>();
        const DirectionSet dirs(out.N);
        for (const auto& r : j.at("rects")) {
            const double theta = r.contains("j") ? dirs.angle(r.at("j").get<int>()) : r.at("theta").get<double>();
            out.rects.emplace_back(Point{r.at("cx").get<double>(), r.at("cy").get<double>()}, r.at("L").get<double>(),
                                   r.at("l").get<double>(), theta);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed directional family: ") + e.what());
    }
    if (!is_power_of_two(out.side)) throw ParseError("family side must be a power of two");
    if (out.rects.empty()) throw ParseError("family has no rectangles");
    return out;
}

namespace {

ojson checks_json(const std::vector<CheckReport>& checks) {
    ojson arr = ojson::array();
    for (const auto& c : checks) {
        ojson e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["checked"] = c.checked;
        if (!c.witness.empty()) e["witness"] = c.witness;
        if (!c.detail.empty()) e["detail"] = c.detail;
        arr.push_back(e);
    }
    return arr;
}

} // namespace

std::string selection_to_json(const DyadicSelection& sel, const std::vector<CheckReport>& checks) {
    ojson j;
    j["mode"] = "dyadic";
    j["side"] = sel.side;
    j["threshold"] = std::to_string(sel.threshold.num()) + "/" + std::to_string(sel.threshold.den());
    j["input"] = ojson::parse(family_to_json(sel.input, sel.side))["rects"];
    j["selected"] = sel.selected;
    ojson steps = ojson::array();
    for (const auto& s : sel.trace) {
        ojson e;
        e["candidate"] = s.candidate;
        e["overlap"] = s.overlap;
        e["area"] = s.area;
        e["ratio"] = round12(double(s.overlap) / double(s.area));
        e["selected"] = s.selected;
        steps.push_back(e);
    }
    j["trace"] = steps;
    j["checks"] = checks_json(checks);
    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    j["passed"] = all;
    return j.dump(2);
}

std::string selection_to_json(const DirectionalSelection& sel, const std::vector<CheckReport>& checks,
                              const DirectionalCoveringReport* covering) {
    ojson j;
    j["mode"] = "directional";
    j["threshold"] = round12(sel.threshold);
    j["expansion"] = round12(sel.expansion);
    j["input"] = ojson::parse(family_to_json(sel.input, 0, 0))["rects"];
    j["selected"] = sel.selected;
    ojson steps = ojson::array();
    for (const auto& s : sel.trace) {
        ojson e;
        e["candidate"] = s.candidate;
        e["overlap_sum"] = round12(s.overlap_sum);
        e["area"] = round12(s.area);
        e["ratio"] = round12(s.overlap_sum / s.area);
        e["selected"] = s.selected;
        steps.push_back(e);
    }
    j["trace"] = steps;
    j["checks"] = checks_json(checks);
    if (covering) {
        ojson c;
        c["N"] = covering->N;
        c["cells_checked"] = covering->cells_checked;
        c["min_mq_y"] = round12(covering->min_mq_y);
        c["min_mq_y_times_log_n"] = round12(covering->min_scaled);
        c["witness"] = {covering->witness_x, covering->witness_y};
        j["covering"] = c;
    }
    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    j["passed"] = all;
    return j.dump(2);
}

} // namespace maxlab
