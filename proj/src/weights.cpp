#include "maxlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "maxlab/grid_io.hpp"
#include "maxlab/integrate.hpp"
#include "maxlab/rng.hpp"
#include "maxlab/spec_args.hpp"

namespace maxlab {

double weighted_measure(const Grid2D& w, const std::function<bool(int, int)>& pred) {
    double total = 0.0;
    for (int y = 0; y < w.side(); ++y)
        for (int x = 0; x < w.side(); ++x)
            if (pred(x, y)) total += w(x, y);
    return total;
}

double superlevel_measure(const Grid2D& w, const Grid2D& field, double t) {
    if (w.side() != field.side()) throw BoundsError("weight and field sides differ");
    double total = 0.0;
    const auto wc = w.cells();
    const auto fc = field.cells();
    for (std::size_t k = 0; k < wc.size(); ++k)
        if (fc[k] > t) total += wc[k];
    return total;
}

double lp_norm(const Grid2D& f, const Grid2D& w, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ExponentError("L^p norm needs p >= 1, got " + format_number(p));
    if (f.side() != w.side()) throw BoundsError("function and weight sides differ");
    const auto fc = f.cells();
    const auto wc = w.cells();
    // Neumaier-compensated sum.
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < fc.size(); ++k) {
        if (fc[k] == 0.0 || wc[k] == 0.0) continue;
        const double term = std::pow(fc[k], p) * wc[k];
        const double s = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
        sum = s;
    }
    return std::pow(sum + comp, 1.0 / p);
}

namespace {

struct Span {
    int lo;
    int hi;  // exclusive
};

std::vector<Span> all_intervals(int n, bool dyadic) {
    std::vector<Span> out;
    if (dyadic) {
        for (int len = 1; len <= n; len *= 2)
            for (int a = 0; a < n; a += len) out.push_back({a, a + len});
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b <= n; ++b) out.push_back({a, b});
    }
    return out;
}

} // namespace

ApStarEstimate apstar_constant(const Grid2D& w, double p, bool restrict_dyadic) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ExponentError("A_p* constant needs p >= 1, got " + format_number(p));
    const int n = w.side();
    ApStarEstimate est;
    est.p = p;
    const auto spans = all_intervals(n, restrict_dyadic);
    est.basis_scanned = static_cast<std::int64_t>(spans.size()) * static_cast<std::int64_t>(spans.size());
    const auto cells = w.cells();
    if (std::any_of(cells.begin(), cells.end(), [](double v) { return v == 0.0; })) {
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }

    const SummedAreaTable<double> sat_w(w);
    double best = 0.0;
    if (p == 1.0) {
        // Column-wise running minima over x-spans, combined over y-spans.
        for (const Span& sx : spans) {
            std::vector<double> colmin(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
            for (int y = 0; y < n; ++y)
                for (int x = sx.lo; x < sx.hi; ++x) colmin[y] = std::min(colmin[y], w(x, y));
            for (const Span& sy : spans) {
                double m = std::numeric_limits<double>::infinity();
                for (int y = sy.lo; y < sy.hi; ++y) m = std::min(m, colmin[y]);
                const double area = double(sx.hi - sx.lo) * (sy.hi - sy.lo);
                const double avg = sat_w.sum(sx.lo, sx.hi, sy.lo, sy.hi) / area;
                best = std::max(best, avg / m);
            }
        }
    } else {
        const double dual_exp = -1.0 / (p - 1.0);
        const Grid2D sigma = map_cells(w, [&](double v) { return std::pow(v, dual_exp); });
        const SummedAreaTable<double> sat_s(sigma);
        for (const Span& sx : spans) {
            for (const Span& sy : spans) {
                const double area = double(sx.hi - sx.lo) * (sy.hi - sy.lo);
                const double aw = sat_w.sum(sx.lo, sx.hi, sy.lo, sy.hi) / area;
                const double as = sat_s.sum(sx.lo, sx.hi, sy.lo, sy.hi) / area;
                best = std::max(best, aw * std::pow(as, p - 1.0));
            }
        }
    }
    est.value = best;
    return est;
}

double llogl_functional(const Grid2D& f, const Grid2D& W, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ThresholdError("threshold t must be positive, got " + format_number(t));
    if (f.side() != W.side()) throw BoundsError("function and weight sides differ");
    const auto fc = f.cells();
    const auto wc = W.cells();
    double total = 0.0;
    for (std::size_t k = 0; k < fc.size(); ++k) {
        if (fc[k] == 0.0) continue;
        const double r = fc[k] / t;
        total += r * (1.0 + std::max(0.0, std::log(r))) * wc[k];
    }
    return total;
}

std::string to_string(WeightKind kind) {
    switch (kind) {
    case WeightKind::Constant: return "constant";
    case WeightKind::Checkerboard: return "checkerboard";
    case WeightKind::Power: return "power";
    case WeightKind::Spike: return "spike";
    case WeightKind::Lognormal: return "lognormal";
    }
    return "unknown";
}

std::string WeightSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << ':';
    switch (kind) {
    case WeightKind::Constant: os << format_number(value); break;
    case WeightKind::Checkerboard: os << format_number(low) << ',' << format_number(high); break;
    case WeightKind::Power:
        os << "a=" << format_number(exponent) << ",cx=" << format_number(center_x) << ",cy=" << format_number(center_y);
        break;
    case WeightKind::Spike: os << spike_x << ',' << spike_y << ",eps=" << format_number(epsilon); break;
    case WeightKind::Lognormal: os << "seed=" << seed << ",sigma=" << format_number(sigma); break;
    }
    return os.str();
}

WeightSpec parse_weight_spec(const std::string& text) {
    const SpecArgs parsed = SpecArgs::parse(text);
    const std::string& kind = parsed.kind;
    auto arg = [&](const std::string& key, std::size_t pos, double fallback) { return parsed.number(key, pos, fallback); };

    WeightSpec spec;
    if (kind == "constant") {
        spec.kind = WeightKind::Constant;
        spec.value = arg("c", 0, 1.0);
    } else if (kind == "checkerboard") {
        spec.kind = WeightKind::Checkerboard;
        spec.low = arg("a", 0, 1.0);
        spec.high = arg("b", 1, 4.0);
    } else if (kind == "power") {
        spec.kind = WeightKind::Power;
        spec.exponent = arg("a", 0, 1.0);
        spec.center_x = arg("cx", 1, 0.0);
        spec.center_y = arg("cy", 2, 0.0);
        if (!(spec.exponent > -2.0)) throw ParseError("power weight needs exponent > -2");
    } else if (kind == "spike") {
        spec.kind = WeightKind::Spike;
        spec.spike_x = static_cast<int>(arg("x", 0, 0.0));
        spec.spike_y = static_cast<int>(arg("y", 1, 0.0));
        spec.epsilon = arg("eps", 2, 1e-9);
    } else if (kind == "lognormal") {
        spec.kind = WeightKind::Lognormal;
        spec.seed = parsed.unsigned_integer("seed", 0, 0);
        spec.sigma = arg("sigma", 1, 1.0);
    } else {
        throw ParseError("unknown weight kind '" + kind + "'");
    }
    return spec;
}

Grid2D make_weight(const WeightSpec& spec, int side) {
    Grid2D g(side);
    switch (spec.kind) {
    case WeightKind::Constant:
        return Grid2D(side, spec.value);
    case WeightKind::Checkerboard:
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) g.set(x, y, (x + y) % 2 == 0 ? spec.low : spec.high);
        return g;
    case WeightKind::Power:
        if (!(spec.exponent > -2.0)) throw ParseError("power weight needs exponent > -2");
        for (int y = 0; y < side; ++y) {
            for (int x = 0; x < side; ++x) {
                const double r = std::hypot(x + 0.5 - spec.center_x, y + 0.5 - spec.center_y);
                g.set(x, y, std::pow(r, spec.exponent));
            }
        }
        return g;
    case WeightKind::Spike:
        g = Grid2D(side, spec.epsilon);
        g.set(spec.spike_x, spec.spike_y, 1.0);
        return g;
    case WeightKind::Lognormal: {
        Rng rng(spec.seed);
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) g.set(x, y, std::exp(spec.sigma * rng.normal()));
        return g;
    }
    }
    throw ParseError("unknown weight kind");
}

} // namespace maxlab
