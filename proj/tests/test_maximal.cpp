#include <doctest.h>

#include <chrono>
#include <numbers>

#include "maxlab/error.hpp"
#include "maxlab/maximal.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

std::vector<double> values(const Grid2D& g) { return {g.cells().begin(), g.cells().end()}; }

bool dominates(const Grid2D& big, const Grid2D& small, double tol = 1e-12) {
    for (std::size_t k = 0; k < big.size(); ++k)
        if (big.cells()[k] < small.cells()[k] - tol * std::max(1.0, small.cells()[k])) return false;
    return true;
}

const std::vector<ScalePair> kSmallScales{{1, 1}, {2, 1}, {4, 1}, {4, 2}, {8, 2}};

} // namespace

TEST_CASE("constant grids are fixed points") {
    const Grid2D c(8, 2.5);
    CHECK(hl_maximal(c, false).values == c);
    CHECK(hl_maximal(c, true).values == c);
    CHECK(strong_maximal(c).values == c);
    const auto d = directional_maximal(c, DirectionSet(16), default_scale_grid(8));
    for (double v : d.values.cells()) CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
    const auto W = compose_W(Grid2D(8, 1.0));
    for (double v : W.values.cells()) CHECK(v == 1.0);
}

TEST_CASE("dyadic HL: far corner of a 4x4 impulse") {
    IntGrid g(4);
    g.set(0, 0, 1);
    const auto m = hl_maximal_values(g, true);
    CHECK(m(3, 3) == Fraction(1, 16));
    CHECK(m(0, 0) == Fraction(1));
    CHECK(m(1, 1) == Fraction(1, 4));
}

TEST_CASE("fast HL and strong equal brute force exactly") {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 << rng.uniform_int(0, 3);
        const IntGrid g = oracle::random_int_grid(rng, n, trial % 2 ? 1 : 50);
        REQUIRE(hl_maximal_values(g, false).cells().size() == std::size_t(n * n));
        const auto axis = hl_maximal_values(g, false), dyad = hl_maximal_values(g, true);
        const auto strong = strong_maximal_values(g);
        const auto o_axis = oracle::hl(g, false), o_dyad = oracle::hl(g, true), o_strong = oracle::strong(g);
        for (int k = 0; k < n * n; ++k) {
            REQUIRE(axis.cells()[k] == o_axis[k]);
            REQUIRE(dyad.cells()[k] == o_dyad[k]);
            REQUIRE(strong.cells()[k] == o_strong[k]);
        }
    }
}

TEST_CASE("double backend agrees with the double oracle") {
    Rng rng(77);
    const Grid2D g = oracle::random_grid(rng, 8);
    const auto s = values(strong_maximal(g).values);
    const auto h = values(hl_maximal(g, false).values);
    const auto os = oracle::strong(g), oh = oracle::hl(g);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s[k] == doctest::Approx(os[k]).epsilon(1e-12));
        CHECK(h[k] == doctest::Approx(oh[k]).epsilon(1e-12));
    }
}

TEST_CASE("strong maximal of the bottom row indicator") {
    const int n = 8;
    IntGrid g(n);
    for (int x = 0; x < n; ++x) g.set(x, 0, 1);
    const auto m = strong_maximal_values(g);
    const auto o = oracle::strong(g);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            CHECK(m(x, y) == Fraction(1, y + 1));
            CHECK(m(x, y) == o[y * n + x]);
        }
}

TEST_CASE("basis ordering, domination, homogeneity, sublinearity, monotonicity") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid2D f = oracle::random_grid(rng, 8), g = oracle::random_grid(rng, 8);
        const auto dy = hl_maximal(f, true).values, ax = hl_maximal(f, false).values, st = strong_maximal(f).values;
        CHECK(dominates(ax, dy));
        CHECK(dominates(st, ax));
        CHECK(dominates(dy, f));

        Grid2D sum(8), scaled(8), bigger(8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                sum.set(x, y, f(x, y) + g(x, y));
                scaled.set(x, y, 3.0 * f(x, y));
                bigger.set(x, y, f(x, y) + 0.5 * g(x, y));
            }
        const auto ssum = strong_maximal(sum).values, sg = strong_maximal(g).values;
        const auto sscaled = strong_maximal(scaled).values, sbig = strong_maximal(bigger).values;
        for (std::size_t k = 0; k < ssum.size(); ++k) {
            CHECK(ssum.cells()[k] <= st.cells()[k] + sg.cells()[k] + 1e-12);
            CHECK(sscaled.cells()[k] == doctest::Approx(3.0 * st.cells()[k]).epsilon(1e-12));
            CHECK(sbig.cells()[k] >= st.cells()[k] - 1e-12);
        }
    }
}

TEST_CASE("directional: domination and basis membership") {
    Rng rng(5);
    const Grid2D f = oracle::random_grid(rng, 8);
    const auto d = directional_maximal(f, DirectionSet(16), default_scale_grid(8)).values;
    CHECK(dominates(d, f, 1e-9));
    // theta = 0 with an axis scale (4, 2): the rectangle [0,4)x[0,2) is a
    // lattice position (stride 1), so every cell in it sees at least its average.
    const double avg = oracle::rect_mass(f, 0, 4, 0, 2) / 8.0;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) CHECK(d(x, y) >= avg - 1e-9);
}

TEST_CASE("directional: equals integrate_rotated on the same translation lattice") {
    Rng rng(8);
    const DirectionSet dirs(16);
    std::vector<double> thetas;
    for (int j : dirs.orientation_indices()) thetas.push_back(dirs.angle(j));
    for (int trial = 0; trial < 3; ++trial) {
        const Grid2D f = oracle::random_grid(rng, 8);
        const auto fast = directional_maximal(f, dirs, kSmallScales).values;
        const auto slow = oracle::directional(f, thetas, kSmallScales, 0.5);
        for (std::size_t k = 0; k < slow.size(); ++k) REQUIRE(fast.cells()[k] == doctest::Approx(slow[k]).epsilon(1e-9));
    }
}

namespace {

struct LatticeGap {
    double per_cell = 0.0;  // max over cells of (dense - fast) / dense
    double sup = 0.0;       // max (dense - fast) / max dense
    double l1 = 0.0;        // sum (dense - fast) / sum dense
    bool below = true;      // fast <= dense everywhere
};

LatticeGap impulse_gap(int refinement) {
    Grid2D f(8);
    f.set(3, 4, 1.0);
    const DirectionSet dirs(16);
    std::vector<double> thetas;
    for (int j : dirs.orientation_indices()) thetas.push_back(dirs.angle(j));
    const auto fast = directional_maximal(f, dirs, kSmallScales, refinement).values;
    const auto dense = oracle::directional(f, thetas, kSmallScales, 0.125 / refinement);
    LatticeGap gap;
    double peak = 0.0, diff = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < dense.size(); ++k) {
        const double d = dense[k] - fast.cells()[k];
        gap.below = gap.below && d >= -1e-9;
        if (dense[k] > 0) gap.per_cell = std::max(gap.per_cell, d / dense[k]);
        gap.sup = std::max(gap.sup, d);
        peak = std::max(peak, dense[k]);
        diff += d;
        mass += dense[k];
    }
    gap.sup /= peak;
    gap.l1 = diff / mass;
    return gap;
}

} // namespace

// The stride-l/2 lattice cannot reach some rectangles of the 4x finer lattice
// at all, so per-cell agreement within 5% does not hold for an impulse.
TEST_CASE("directional: impulse within 5% per cell of the 4x finer lattice" * doctest::should_fail()) {
    const LatticeGap gap = impulse_gap(1);
    MESSAGE("stride l/2: per-cell gap " << gap.per_cell << ", sup gap " << gap.sup << ", L1 gap " << gap.l1);
    CHECK(gap.per_cell <= 0.05);
}

TEST_CASE("directional: lower approximation converging under refinement") {
    const LatticeGap coarse = impulse_gap(1);
    const LatticeGap fine = impulse_gap(4);
    CHECK(coarse.below);
    CHECK(fine.below);
    MESSAGE("L1 gap to the 4x finer lattice: stride l/2 " << coarse.l1 << ", stride l/8 " << fine.l1);
    CHECK(fine.l1 < coarse.l1);
    CHECK(fine.l1 <= 0.05);
}

TEST_CASE("directional: refinement must be a power of two") {
    CHECK_THROWS_AS(directional_maximal(Grid2D(4, 1.0), DirectionSet(16), kSmallScales, 3), GeometryError);
    CHECK(directional_maximal(Grid2D(4, 1.0), DirectionSet(16), kSmallScales, 2).meta.back().second == "l/4");
}

TEST_CASE("directional: preconditions") {
    CHECK_THROWS_AS(DirectionSet(10), PreconditionError);
    CHECK_THROWS_AS(DirectionSet(8), PreconditionError);
    const Grid2D f(4, 1.0);
    const std::vector<ScalePair> bad{{1, 2}};
    CHECK_THROWS_AS(directional_maximal(f, DirectionSet(16), bad), GeometryError);
    const std::vector<ScalePair> odd{{1.0 / 3.0, 0.25}};
    CHECK_THROWS_AS(directional_maximal(f, DirectionSet(16), odd), GeometryError);
    CHECK_THROWS_AS(directional_maximal(f, DirectionSet(16), std::vector<ScalePair>{}), GeometryError);
}

TEST_CASE("direction set sectors") {
    for (int n : {11, 16, 17, 32, 64, 100}) {
        const DirectionSet dirs(n);
        CHECK(dirs.vectors().size() == std::size_t(n));
        std::size_t total = 0;
        for (const auto& s : dirs.sectors()) {
            total += s.size();
            std::vector<double> th;
            for (int j : s) th.push_back(dirs.angle(j));
            CHECK(angular_diameter(th) <= std::numbers::pi / 4 + 1e-12);
        }
        CHECK(total == std::size_t(n));
    }
}

TEST_CASE("scale grid") {
    const auto s = default_scale_grid(4);
    CHECK(describe_scales(s) == "1:1,2:2,2:1,4:4,4:2,4:1");
    CHECK(parse_scales("1:1,2:2,2:1,4:4,4:2,4:1") == s);
    CHECK_THROWS_AS(parse_scales("4"), ParseError);
}

TEST_CASE("compose_W dominates its inner operators") {
    Rng rng(41);
    const Grid2D w = oracle::random_grid(rng, 8);
    const auto W = compose_W(w).values;
    const auto q = hl_maximal(w, false).values;
    CHECK(dominates(W, q));
    CHECK(dominates(q, w));
    Grid2D point(8);
    point.set(0, 0, 1.0);
    const auto Wp = compose_W(point).values;
    const auto inner = oracle::hl(point);
    const auto outer = oracle::strong(Grid2D(8, inner));
    CHECK(Wp(7, 7) == doctest::Approx(outer[63]).epsilon(1e-12));
    for (std::size_t k = 0; k < outer.size(); ++k) CHECK(Wp.cells()[k] == doctest::Approx(outer[k]).epsilon(1e-12));
    const auto Wd = compose_W(w, DirectionSet(16), default_scale_grid(8));
    CHECK(Wd.meta[0].second == "W-directional");
    CHECK(dominates(Wd.values, q, 1e-9));
}

TEST_CASE("unweighted weak (1,1) sanity for HL") {
    Rng rng(12);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Grid2D f = oracle::random_grid(rng, 16);
        const auto m = hl_maximal(f, false).values;
        double mass = 0.0;
        for (double v : f.cells()) mass += v;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            double count = 0;
            for (double v : m.cells()) count += v > t ? 1 : 0;
            worst = std::max(worst, t * count / mass);
        }
    }
    MESSAGE("observed weak (1,1) constant: " << worst);
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
}

TEST_CASE("directional timing at side 32 with the default scale grid") {
    Rng rng(1);
    const Grid2D f = oracle::random_grid(rng, 32);
    const auto t0 = std::chrono::steady_clock::now();
    (void)directional_maximal(f, DirectionSet(64), default_scale_grid(32));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("directional N=64 side=32: " << ms << " ms");
}
