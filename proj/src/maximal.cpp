#include "maxlab/maximal.hpp"

#include <algorithm>
#include <deque>

#include "maxlab/integrate.hpp"

namespace maxlab {

namespace {

// out[i] = max a[j] over j in [max(0, i-s+1), min(i, m-1)], for i in [0, n),
// where m = a.size() = n - s + 1: the best window of length s covering i.
template <class A>
void covering_window_max(const std::vector<A>& a, int s, int n, std::vector<A>& out) {
    const int m = static_cast<int>(a.size());
    out.resize(static_cast<std::size_t>(n));
    std::deque<int> q;
    for (int i = 0; i < n; ++i) {
        if (i < m) {
            while (!q.empty() && !(a[q.back()] > a[i])) q.pop_back();
            q.push_back(i);
        }
        while (q.front() < i - s + 1) q.pop_front();
        out[i] = a[q.front()];
    }
}

template <class T>
BasicGrid<average_t<T>> hl_axis(const BasicGrid<T>& g) {
    using Avg = average_t<T>;
    const int n = g.side();
    const SummedAreaTable<T> sat(g);
    std::vector<Avg> best(static_cast<std::size_t>(n) * n, Avg(0));
    std::vector<Avg> windows, column, col_out, row_out;
    std::vector<Avg> stage;
    for (int s = 1; s <= n; ++s) {
        const int m = n - s + 1;
        const std::int64_t area = std::int64_t(s) * s;
        // stage[y0 * n + x]: best window along x covering x, for window row y0.
        stage.assign(static_cast<std::size_t>(m) * n, Avg(0));
        windows.resize(static_cast<std::size_t>(m));
        for (int y0 = 0; y0 < m; ++y0) {
            for (int x0 = 0; x0 < m; ++x0) windows[x0] = AverageOf<T>::make(sat.sum(x0, x0 + s, y0, y0 + s), area);
            covering_window_max(windows, s, n, row_out);
            std::copy(row_out.begin(), row_out.end(), stage.begin() + static_cast<std::ptrdiff_t>(y0) * n);
        }
        column.resize(static_cast<std::size_t>(m));
        for (int x = 0; x < n; ++x) {
            for (int y0 = 0; y0 < m; ++y0) column[y0] = stage[static_cast<std::size_t>(y0) * n + x];
            covering_window_max(column, s, n, col_out);
            for (int y = 0; y < n; ++y) {
                Avg& b = best[static_cast<std::size_t>(y) * n + x];
                if (col_out[y] > b) b = col_out[y];
            }
        }
    }
    return BasicGrid<Avg>(n, std::move(best));
}

template <class T>
BasicGrid<average_t<T>> hl_dyadic(const BasicGrid<T>& g) {
    using Avg = average_t<T>;
    const int n = g.side();
    const int top = log2_exact(n);
    const SummedAreaTable<T> sat(g);
    std::vector<Avg> best(static_cast<std::size_t>(n) * n, Avg(0));
    for (int k = 0; k <= top; ++k) {
        const int s = 1 << k;
        const std::int64_t area = std::int64_t(s) * s;
        for (int y = 0; y < n; ++y) {
            const int y0 = (y >> k) << k;
            for (int x = 0; x < n; ++x) {
                const int x0 = (x >> k) << k;
                const Avg a = AverageOf<T>::make(sat.sum(x0, x0 + s, y0, y0 + s), area);
                Avg& b = best[static_cast<std::size_t>(y) * n + x];
                if (a > b) b = a;
            }
        }
    }
    return BasicGrid<Avg>(n, std::move(best));
}

} // namespace

template <class T>
BasicGrid<average_t<T>> hl_maximal_values(const BasicGrid<T>& g, bool dyadic) {
    return dyadic ? hl_dyadic(g) : hl_axis(g);
}

// For every band of rows [y0, y1] the 1D problem "best interval of columns
// covering x" is solved by a dominance recursion over intervals:
//   best[a][b] = max(avg(a, b), best[a-1][b], best[a][b+1]),
// whose diagonal best[x][x] is the max over all intervals containing x. The
// same recursion over bands, indexed by (y0, y1), then gives the max over
// all bands containing a row. Everything is exact: only comparisons.
template <class T>
BasicGrid<average_t<T>> strong_maximal_values(const BasicGrid<T>& g) {
    using Avg = average_t<T>;
    const int n = g.side();
    const std::size_t nn = static_cast<std::size_t>(n);
    const SummedAreaTable<T> sat(g);

    std::vector<T> colsum(nn + 1);
    std::vector<Avg> iv_prev(nn), iv_cur(nn);  // best[a-1][*], best[a][*]
    std::vector<Avg> band_best(nn);            // diagonal of the interval recursion
    std::vector<Avg> d_prev(nn * nn), d_cur(nn * nn);  // band recursion, [y1 * n + x]
    std::vector<Avg> out(nn * nn);

    for (int y0 = 0; y0 < n; ++y0) {
        for (int y1 = n - 1; y1 >= y0; --y1) {
            const std::int64_t h = y1 - y0 + 1;
            colsum[0] = T(0);
            for (int x = 0; x < n; ++x) colsum[x + 1] = colsum[x] + sat.sum(x, x + 1, y0, y1 + 1);

            for (int a = 0; a < n; ++a) {
                for (int b = n - 1; b >= a; --b) {
                    Avg v = AverageOf<T>::make(colsum[b + 1] - colsum[a], h * (b - a + 1));
                    if (a > 0 && iv_prev[b] > v) v = iv_prev[b];
                    if (b < n - 1 && iv_cur[b + 1] > v) v = iv_cur[b + 1];
                    iv_cur[b] = v;
                }
                band_best[a] = iv_cur[a];
                std::swap(iv_prev, iv_cur);
            }

            Avg* cur = &d_cur[static_cast<std::size_t>(y1) * nn];
            const Avg* up = y1 < n - 1 ? &d_cur[static_cast<std::size_t>(y1 + 1) * nn] : nullptr;
            const Avg* left = y0 > 0 ? &d_prev[static_cast<std::size_t>(y1) * nn] : nullptr;
            for (int x = 0; x < n; ++x) {
                Avg v = band_best[x];
                if (left && left[x] > v) v = left[x];
                if (up && up[x] > v) v = up[x];
                cur[x] = v;
            }
        }
        std::copy_n(&d_cur[static_cast<std::size_t>(y0) * nn], nn, &out[static_cast<std::size_t>(y0) * nn]);
        std::swap(d_prev, d_cur);
    }
    return BasicGrid<Avg>(n, std::move(out));
}

template BasicGrid<double> hl_maximal_values<double>(const Grid2D&, bool);
template BasicGrid<Fraction> hl_maximal_values<std::int64_t>(const IntGrid&, bool);
template BasicGrid<double> strong_maximal_values<double>(const Grid2D&);
template BasicGrid<Fraction> strong_maximal_values<std::int64_t>(const IntGrid&);

std::string to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::HlAxis: return "hl";
    case OperatorKind::HlDyadic: return "hl-dyadic";
    case OperatorKind::Strong: return "strong";
    case OperatorKind::Directional: return "directional";
    case OperatorKind::ComposedW: return "W";
    case OperatorKind::ComposedWDirectional: return "W-directional";
    }
    return "unknown";
}

MaximalField hl_maximal(const Grid2D& g, bool dyadic) {
    const auto kind = dyadic ? OperatorKind::HlDyadic : OperatorKind::HlAxis;
    return {kind, {{"operator", to_string(kind)}, {"side", std::to_string(g.side())}}, hl_maximal_values(g, dyadic)};
}

MaximalField strong_maximal(const Grid2D& g) {
    return {OperatorKind::Strong,
            {{"operator", to_string(OperatorKind::Strong)}, {"side", std::to_string(g.side())}},
            strong_maximal_values(g)};
}

MaximalField compose_W(const Grid2D& w) {
    return {OperatorKind::ComposedW,
            {{"operator", to_string(OperatorKind::ComposedW)}, {"inner", "hl"}, {"side", std::to_string(w.side())}},
            strong_maximal_values(hl_maximal_values(w, false))};
}

MaximalField compose_W(const Grid2D& w, const DirectionSet& dirs, std::span<const ScalePair> scales, int refinement) {
    auto outer = directional_maximal(hl_maximal_values(w, false), dirs, scales, refinement);
    outer.kind = OperatorKind::ComposedWDirectional;
    outer.meta.front().second = to_string(OperatorKind::ComposedWDirectional);
    outer.meta.insert(outer.meta.begin() + 1, {"inner", "hl"});
    return outer;
}

} // namespace maxlab
