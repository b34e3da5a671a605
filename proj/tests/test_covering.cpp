#include <doctest.h>

#include <cmath>
#include <numbers>

#include "maxlab/covering.hpp"
#include "maxlab/error.hpp"
#include "maxlab/maximal.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

DyadicRect rect(int x0, int x1, int y0, int y1) {
    return parse_dyadic_family("{\"side\":64,\"rects\":[[" + std::to_string(x0) + "," + std::to_string(x1) + "," +
                               std::to_string(y0) + "," + std::to_string(y1) + "]]}")
        .rects.front();
}

bool all_pass(const DyadicSelection& sel) {
    return check_dyadic_certificates(sel).passed && check_covering_inclusion(sel).passed &&
           multiplicity_bound_check(sel).passed && check_structural_fact(sel).passed;
}

// Max over (i, n) of |X_{i,n}| by a direct recount of every prefix.
bool multiplicity_oracle(const DyadicSelection& sel) {
    const int n = sel.side;
    for (std::size_t i = 0; i < sel.selected.size(); ++i) {
        const AxisRect r = sel.input[sel.selected[i]].to_axis();
        std::vector<std::int64_t> at_least(i + 2, 0);
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) {
                int m = 0;
                for (std::size_t j = 0; j <= i; ++j) {
                    const AxisRect q = sel.input[sel.selected[j]].to_axis();
                    m += (x >= q.x0 && x < q.x1 && y >= q.y0 && y < q.y1) ? 1 : 0;
                }
                for (int level = 1; level <= m; ++level) ++at_least[static_cast<std::size_t>(level)];
            }
        for (std::size_t level = 1; level < at_least.size(); ++level) {
            if (static_cast<double>(at_least[level]) > std::pow(3.0, 1.0 - double(level)) * double(r.area()) + 1e-9)
                return false;
        }
    }
    (void)n;
    return true;
}

} // namespace

TEST_CASE("select_dyadic: small examples") {
    {
        const auto sel = select_dyadic({rect(0, 4, 0, 2), rect(0, 4, 0, 2)}, 8);
        REQUIRE(sel.selected == std::vector<std::size_t>{0});
        CHECK(sel.trace[1].overlap == sel.trace[1].area);
        CHECK(all_pass(sel));
    }
    {
        const auto sel = select_dyadic({rect(0, 4, 0, 2), rect(4, 8, 0, 2), rect(0, 2, 4, 6), rect(4, 5, 7, 8)}, 8);
        CHECK(sel.selected.size() == 4);
        CHECK(all_pass(sel));
        const auto mult = multiplicity_field(sel, Grid2D(8, 1.0));
        for (auto c : mult.count.cells()) CHECK(c <= 1);
    }
    {
        const auto sel = select_dyadic({rect(0, 8, 0, 1), rect(0, 2, 0, 2)}, 8);
        REQUIRE(sel.selected == std::vector<std::size_t>{0});
        CHECK(sel.trace[1].overlap == 2);
        CHECK(sel.trace[1].area == 4);
    }
    {
        // Single rectangle: inclusion holds trivially; n=1 bound is an equality.
        const auto sel = select_dyadic({rect(0, 4, 0, 4)}, 8);
        CHECK(check_covering_inclusion(sel).passed);
        CHECK(multiplicity_bound_check(sel).passed);
    }
}

TEST_CASE("select_dyadic: ordering and threshold") {
    // Processed by |P1| descending, ties by input order.
    const auto sel = select_dyadic({rect(0, 2, 0, 1), rect(0, 8, 0, 1), rect(2, 4, 0, 1), rect(0, 8, 1, 2)}, 8);
    CHECK(sel.order == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK(sel.selected == std::vector<std::size_t>{1, 3});
    // Overlap exactly 1/3 of the area is rejected (strict inequality).
    const auto third = select_dyadic({rect(0, 4, 0, 1), rect(0, 4, 0, 1), rect(0, 4, 0, 1)}, 8, Fraction(1, 1));
    CHECK(third.selected.size() == 1);
    CHECK_THROWS_AS(rect(0, 1, 0, 4), OrientationError);
    CHECK_THROWS_AS(parse_dyadic_family("{\"side\":8,\"rects\":[[0,3,0,1]]}"), ParseError);
    CHECK_THROWS_AS(parse_dyadic_family("{\"side\":8,\"rects\":[[1,3,0,1]]}"), ParseError);
    CHECK_THROWS_AS(parse_dyadic_family("{\"side\":8,\"rects\":[[0,16,0,1]]}"), BoundsError);
    CHECK_THROWS_AS(parse_dyadic_family("{\"side\":8,\"rects\":[]}"), ParseError);
    CHECK_THROWS_AS(select_dyadic({}, 8), PreconditionError);
}

TEST_CASE("select_dyadic: random families, every checker against its oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const int side = 1 << rng.uniform_int(2, 5);
        const auto fam = random_dyadic_family(rng, side, static_cast<int>(rng.uniform_int(1, 60)));
        const auto sel = select_dyadic(fam, side);
        REQUIRE(check_dyadic_certificates(sel).passed);
        REQUIRE(check_structural_fact(sel).passed);
        REQUIRE(multiplicity_bound_check(sel).passed);
        REQUIRE(multiplicity_oracle(sel));

        // Inclusion against the loop dyadic maximal oracle.
        IntGrid ind(side);
        for (std::size_t i : sel.selected) {
            const AxisRect r = fam[i].to_axis();
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x) ind.set(x, y, 1);
        }
        const auto m = oracle::hl(ind, true);
        bool ok = true;
        for (const auto& R : fam) {
            const AxisRect r = R.to_axis();
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x) ok = ok && m[static_cast<std::size_t>(y) * side + x] >= Fraction(1, 3);
        }
        REQUIRE(ok);
        REQUIRE(check_covering_inclusion(sel).passed);
    }
}

TEST_CASE("select_dyadic: nested columns") {
    for (int side : {8, 32, 64}) {
        const auto fam = nested_column_family(side);
        const auto sel = select_dyadic(fam, side);
        CHECK(all_pass(sel));
        CHECK(multiplicity_oracle(sel));
    }
}

TEST_CASE("checkers reject corrupted selections") {
    auto sel = select_dyadic({rect(0, 8, 0, 1), rect(0, 2, 0, 2)}, 8);
    sel.selected.push_back(1);
    CHECK_FALSE(check_dyadic_certificates(sel).passed);
    CHECK_FALSE(check_dyadic_certificates(sel).witness.empty());
    CHECK_FALSE(check_structural_fact(sel).passed);

    // Three stacked copies break the 3^(1-n) bound at n = 2.
    auto dup = select_dyadic({rect(0, 4, 0, 1)}, 8);
    dup.input.push_back(rect(0, 4, 0, 1));
    dup.selected.push_back(1);
    CHECK_FALSE(multiplicity_bound_check(dup).passed);

    auto drop = select_dyadic({rect(0, 8, 0, 1), rect(0, 8, 4, 5)}, 8);
    drop.selected.pop_back();
    CHECK_FALSE(check_dyadic_certificates(drop).passed);
    CHECK_FALSE(check_covering_inclusion(drop).passed);
}

TEST_CASE("multiplicity_field") {
    Rng rng(7);
    const auto fam = random_dyadic_family(rng, 16, 40);
    const auto sel = select_dyadic(fam, 16);
    const Grid2D U = oracle::random_grid(rng, 16);
    const auto f = multiplicity_field(sel, U);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            CHECK(f.mu(x, y) >= 0.0);
            if (f.count(x, y) == 0) CHECK(f.mu(x, y) == 0.0);
        }
    // Integral of mu equals the total U-mass of the kept rectangles.
    double mass = 0.0, total = 0.0;
    for (std::size_t i : sel.selected) {
        const AxisRect r = fam[i].to_axis();
        mass += oracle::rect_mass(U, r.x0, r.x1, r.y0, r.y1);
    }
    for (double v : f.mu.cells()) total += v;
    CHECK(total == doctest::Approx(mass).epsilon(1e-12));
}

// ---- directional ----

TEST_CASE("select_directional: small examples") {
    const RotatedRect a({8, 8}, 4, 1, 0.2);
    const RotatedRect b({20, 20}, 4, 2, 0.3);
    {
        const auto sel = select_directional({a, a});
        CHECK(sel.selected == std::vector<std::size_t>{0});
        CHECK(sel.trace[1].overlap_sum == doctest::Approx(a.area()).epsilon(1e-12));
        CHECK(check_directional_certificates(sel).passed);
    }
    {
        const auto sel = select_directional({a, b});
        CHECK(sel.order == std::vector<std::size_t>{0, 1});
        CHECK(sel.selected.size() == 2);
    }
    {
        // Half-overlap sits on the threshold and is rejected.
        const RotatedRect c({8, 8}, 4, 2, 0.0), d({10, 8}, 4, 2, 0.0);
        const auto sel = select_directional({c, d});
        CHECK(sel.selected == std::vector<std::size_t>{0});
        CHECK(check_directional_certificates(sel).passed);
    }
    CHECK_THROWS_AS(select_directional({a, RotatedRect({4, 4}, 2, 1, 1.2)}), SectorError);
    CHECK_NOTHROW(select_directional({RotatedRect({4, 4}, 2, 1, 0.0), RotatedRect({4, 4}, 2, 1, std::numbers::pi / 4)}));
    CHECK_THROWS_AS(select_directional({}), PreconditionError);
}

TEST_CASE("select_directional: Monte Carlo certificate check, 30 rectangles, N=32") {
    Rng rng(202);
    for (int trial = 0; trial < 5; ++trial) {
        const auto fam = random_directional_family(rng, 32, 32, 30);
        const auto sel = select_directional(fam);
        REQUIRE(check_directional_certificates(sel).passed);
        std::vector<bool> kept(fam.size(), false);
        for (auto i : sel.selected) kept[i] = true;
        std::vector<std::size_t> prefix;
        std::uint64_t seed = 1000 * trial;
        for (auto idx : sel.order) {
            double sum = 0.0, var = 0.0;
            for (auto k : prefix) {
                const auto e = oracle::monte_carlo_overlap(fam[idx], fam[k], 40000, ++seed);
                sum += e.mean;
                var += e.stderr_ * e.stderr_;
            }
            const double half = 0.5 * fam[idx].area();
            const double slack = 3.0 * std::sqrt(var) + 1e-9;
            if (kept[idx]) {
                CHECK(sum <= half + slack);
                prefix.push_back(idx);
            } else {
                CHECK(sum >= half - slack);
            }
        }
    }
}

TEST_CASE("certificate checker catches a wrong decision") {
    const RotatedRect a({8, 8}, 4, 2, 0.1);
    auto sel = select_directional({a, a});
    sel.selected.push_back(1);
    CHECK_FALSE(check_directional_certificates(sel).passed);
}

TEST_CASE("build_Y") {
    DirectionalSelection empty;
    for (auto v : build_Y(empty, 16).cells()) CHECK(v == 0);

    DirectionalSelection one;
    one.input = {RotatedRect({8.5, 8.5}, 1, 1, 0.0)};
    one.selected = {0};
    const IntGrid Y = build_Y(one, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) CHECK(Y(x, y) == ((x >= 6 && x <= 10 && y >= 6 && y <= 10) ? 1 : 0));

    Rng rng(303);
    for (int trial = 0; trial < 5; ++trial) {
        const auto sel = select_directional(random_directional_family(rng, 32, 32, 20));
        const IntGrid Yr = build_Y(sel, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                std::int64_t c = 0;
                for (auto i : sel.selected) c += expand_rect(sel.input[i], 5).contains({x + 0.5, y + 0.5}) ? 1 : 0;
                REQUIRE(Yr(x, y) == c);
            }
    }
}

TEST_CASE("check_directional_covering") {
    // Nothing rejected: M_Q Y >= 1 on every input cell.
    const auto sel = select_directional({RotatedRect({8.5, 8.5}, 2, 1, 0.0), RotatedRect({20.5, 20.5}, 2, 2, 0.3)});
    const auto rep = check_directional_covering(sel, 32, 32);
    CHECK(rep.cells_checked > 0);
    CHECK(rep.min_mq_y >= 1.0);
    CHECK(rep.min_scaled == doctest::Approx(rep.min_mq_y * std::log(32.0)));

    // Rejected near-duplicate: its cells see the expanded survivor.
    const RotatedRect a({16, 16}, 8, 2, 0.1), b({16.3, 16.2}, 8, 2, 0.1);
    const auto dup = select_directional({a, b});
    REQUIRE(dup.selected.size() == 1);
    const auto r2 = check_directional_covering(dup, 32, 32);
    CHECK(r2.min_mq_y >= 0.5);

    Rng rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = select_directional(random_directional_family(rng, 32, 32, 30));
        CHECK(check_directional_covering(s, 32, 32).min_mq_y > 0.0);
    }
}

TEST_CASE("check_lemma31: examples") {
    const double w = 2 * std::numbers::pi / 32;
    {
        const Lemma31Instance inst{RotatedRect({5, 5}, 4, 1, 0.0), RotatedRect({25, 25}, 8, 1, w), 32};
        const auto r = check_lemma31(inst);
        CHECK(r.hypothesis_met);
        CHECK(r.lhs == 0.0);
        CHECK(r.passed);
    }
    {
        // R_beta contains R_alpha, angle in bucket k = 1.
        const RotatedRect alpha({16, 16}, 4, 0.5, 0.0);
        const RotatedRect beta({16, 16}, 8, 4, w);
        const auto r = check_lemma31({alpha, beta, 64});
        CHECK(r.hypothesis_met);
        CHECK(r.k == 1);
        CHECK(r.omega_k == doctest::Approx(2 * std::numbers::pi * 2 / 64));
        CHECK(r.s_alpha == doctest::Approx(8 * std::max(0.5, r.omega_k * 4)));
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.rhs_min >= 1.0 / 32);
        CHECK(r.passed);
    }
    {
        const Lemma31Instance far{RotatedRect({5, 5}, 4, 1, 0.0), RotatedRect({5, 5}, 8, 1, 1.2), 16};
        const auto r = check_lemma31(far);
        CHECK_FALSE(r.hypothesis_met);
        CHECK(r.passed);
        const Lemma31Instance short_beta{RotatedRect({5, 5}, 4, 1, 0.0), RotatedRect({5, 5}, 2, 1, 0.0), 16};
        CHECK_FALSE(check_lemma31(short_beta).hypothesis_met);
    }
}

TEST_CASE("check_lemma31: Monte Carlo cross-check of both sides") {
    Rng rng(505);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
        const auto inst = random_lemma31_instance(rng, 32, 32);
        const auto r = check_lemma31(inst);
        if (!r.hypothesis_met) continue;
        ++checked;
        const auto e = oracle::monte_carlo_overlap(inst.alpha, inst.beta, 200000, 7 + trial);
        CHECK(std::abs(e.mean / inst.alpha.area() - r.lhs) <= 3 * e.stderr_ / inst.alpha.area() + 1e-9);
        const RotatedRect Q(r.worst_x, r.s_alpha, r.s_alpha, inst.alpha.theta());
        const auto q = oracle::monte_carlo_overlap(Q, expand_rect(inst.beta, 5), 200000, 99 + trial);
        CHECK(std::abs(q.mean / Q.area() - r.rhs_min) <= 3 * q.stderr_ / Q.area() + 1e-9);
    }
    CHECK(checked > 0);
}

TEST_CASE("family JSON round trip") {
    Rng rng(606);
    const auto fam = random_dyadic_family(rng, 32, 10);
    const auto back = parse_dyadic_family(family_to_json(fam, 32));
    CHECK(back.side == 32);
    CHECK(back.rects == fam);
    const auto dfam = parse_directional_family(
        R"({"side":32,"N":16,"rects":[{"cx":4,"cy":4,"L":4,"l":1,"j":1},{"cx":8,"cy":8,"L":2,"l":1,"theta":0.25}]})");
    CHECK(dfam.N == 16);
    CHECK(dfam.rects[0].theta() == doctest::Approx(DirectionSet(16).angle(1)));
    CHECK(dfam.rects[1].theta() == 0.25);
    CHECK_THROWS_AS(parse_directional_family("{\"side\":32}"), ParseError);
}

TEST_CASE("check_lemma31: long thin R_alpha in bucket 0 breaks the bound") {
    // omega_0 = 0 gives s_alpha = 8 l_alpha, so Q far along R_alpha misses R_beta*.
    const RotatedRect alpha({100, 100}, 64, 1, 0.0);
    const RotatedRect beta({100, 100}, 64, 1, 2 * std::numbers::pi / 16);
    const auto r = check_lemma31({alpha, beta, 16});
    CHECK(r.hypothesis_met);
    CHECK(r.k == 0);
    CHECK(r.s_alpha == 8.0);
    CHECK(r.lhs > 0.03);
    CHECK(r.rhs_min == 0.0);
    CHECK_FALSE(r.passed);
}
