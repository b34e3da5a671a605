// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "maxlab/cli.hpp"
#include "maxlab/covering.hpp"
#include "maxlab/error.hpp"
#include "maxlab/experiments.hpp"
#include "maxlab/grid_io.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/parallel.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

const std::string kBaselines = MAXLAB_BASELINE_DIR;

struct Outcome {
    bool passed = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_number(v); }

// ---- oracle equivalence ----

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    Rng rng(20);
    const int sides[] = {2, 4, 8, 16};
    int grids = 0, mismatches = 0;
    std::string first;
    for (int i = 0; i < 200; ++i) {
        const int n = sides[i % 4];
        const IntGrid g = oracle::random_int_grid(rng, n, i % 3 == 0 ? 3 : 1000);
        const auto axis = hl_maximal_values(g, false);
        const auto dyadic = hl_maximal_values(g, true);
        const auto strong = strong_maximal_values(g);
        const auto ref_axis = oracle::hl(g, false);
        const auto ref_dyadic = oracle::hl(g, true);
        const auto ref_strong = oracle::strong(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const bool ok = axis.cells()[k] == ref_axis[k] && dyadic.cells()[k] == ref_dyadic[k] &&
                            strong.cells()[k] == ref_strong[k];
            if (!ok) {
                if (mismatches == 0) first = "grid " + std::to_string(i) + " cell " + std::to_string(k);
                ++mismatches;
            }
        }
        ++grids;
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.passed = mismatches == 0 && secs < 60.0;
    o.detail = std::to_string(grids) + " grids (sides 2..16), M_Q axis, M_Q dyadic and M_R exact; " +
               std::to_string(mismatches) + " mismatched cells" + (first.empty() ? "" : " (first: " + first + ")") +
               "; " + fmt(secs) + " s";
    return o;
}

// ---- dyadic covering ----

Outcome dyadic_covering() {
    const auto t0 = Clock::now();
    Rng rng(21);
    const int sides[] = {8, 16, 32, 64};
    std::int64_t rects = 0, kept = 0;
    std::vector<std::string> failures;
    for (int i = 0; i < 200; ++i) {
        const int side = sides[i % 4];
        const int count = 1 + static_cast<int>(rng.uniform_int(0, 199));
        const auto fam = random_dyadic_family(rng, side, count);
        const auto sel = select_dyadic(fam, side);
        rects += count;
        kept += static_cast<std::int64_t>(sel.selected.size());
        for (const auto& c : {check_dyadic_certificates(sel), multiplicity_bound_check(sel), check_covering_inclusion(sel),
                              check_structural_fact(sel)}) {
            if (!c.passed) failures.push_back("family " + std::to_string(i) + " " + c.name + " at " + c.witness);
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.passed = failures.empty() && secs < 300.0;
    o.detail = "200 families (sides 8..64, 1..200 rectangles, " + std::to_string(rects) + " total, " +
               std::to_string(kept) + " kept); certificates, multiplicity bound, covering inclusion at 1/3, "
               "structural fact; " + std::to_string(failures.size()) + " failures" +
               (failures.empty() ? "" : " (first: " + failures.front() + ")") + "; " + fmt(secs) + " s";
    return o;
}

// ---- directional covering and the sector lemma ----

Outcome directional_covering() {
    const auto t0 = Clock::now();
    Rng rng(22);
    const int Ns[] = {16, 32, 64};
    std::vector<std::string> failures;
    for (int i = 0; i < 100; ++i) {
        const int N = Ns[i % 3];
        const auto fam = random_directional_family(rng, 32, N, 10 + static_cast<int>(rng.uniform_int(0, 50)));
        const auto c = check_directional_certificates(select_directional(fam));
        if (!c.passed) failures.push_back("family " + std::to_string(i) + " at " + c.witness);
    }

    int instances = 0, draws = 0, lemma_failures = 0, mc_checked = 0, mc_failures = 0;
    double worst = 0.0;
    for (int N : Ns) {
        int met = 0;
        while (met < 500) {
            const auto inst = random_lemma31_instance(rng, N, 32);
            ++draws;
            const auto r = check_lemma31(inst);
            if (!r.hypothesis_met) continue;
            ++met;
            ++instances;
            if (!r.passed) ++lemma_failures;
            if (r.rhs_min > 0) worst = std::max(worst, r.lhs / r.rhs_min);
            else if (r.lhs > 0) worst = std::numeric_limits<double>::infinity();
            if (met % 20 == 0) {
                // Sampling cross-check of the clipped areas on 5% of the instances.
                ++mc_checked;
                const auto e = oracle::monte_carlo_overlap(inst.alpha, inst.beta, 100000, 5000 + instances);
                const RotatedRect Q(r.worst_x, r.s_alpha, r.s_alpha, inst.alpha.theta());
                const auto q = oracle::monte_carlo_overlap(Q, expand_rect(inst.beta, 5), 100000, 9000 + instances);
                const bool ok = std::abs(e.mean / inst.alpha.area() - r.lhs) <= 4 * e.stderr_ / inst.alpha.area() + 1e-9 &&
                                std::abs(q.mean / Q.area() - r.rhs_min) <= 4 * q.stderr_ / Q.area() + 1e-9;
                if (!ok) ++mc_failures;
            }
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.passed = failures.empty() && lemma_failures == 0 && mc_failures == 0 && secs < 300.0;
    o.detail = "100 single-sector families (N 16/32/64): " + std::to_string(failures.size()) +
               " certificate failures" + (failures.empty() ? "" : " (first: " + failures.front() + ")") + "; " +
               std::to_string(instances) + " lemma instances at side 32 (" + std::to_string(draws) + " draws): " +
               std::to_string(lemma_failures) + " above 32, worst lhs/rhs " + fmt(worst) + "; sampling cross-check " +
               std::to_string(mc_checked - mc_failures) + "/" + std::to_string(mc_checked) + "; " + fmt(secs) + " s";
    return o;
}

// ---- inequality suites ----

Outcome inequality_suites() {
    const auto t0 = Clock::now();
    std::vector<std::string> failures;
    std::ostringstream worst;
    auto run_against = [&](std::vector<SuiteKind> kinds) {
        SuiteConfig c;
        c.kinds = kinds;
        c.side = 32;
        c.trials = 1000;
        c.seed = 1;
        const SuiteResult r = run_suite(c);
        for (const auto& f : r.invariant_failures) failures.push_back(f);
        std::vector<bool> covered(r.groups.size(), false);
        for (SuiteKind k : kinds) {
            const std::string text = read_text_file(kBaselines + "/" + suite_name(k) + ".json");
            for (const auto& f : compare_baseline(r, text)) failures.push_back(f);
            const auto j = nlohmann::json::parse(text);
            for (std::size_t g = 0; g < r.groups.size(); ++g)
                if (j["worst"].contains(r.groups[g].key)) covered[g] = true;
        }
        for (std::size_t g = 0; g < r.groups.size(); ++g) {
            if (!std::isfinite(r.groups[g].worst_ratio)) failures.push_back(r.groups[g].key + ": infinite worst ratio");
            if (!covered[g]) failures.push_back(r.groups[g].key + ": no baseline");
            worst << (worst.tellp() > 0 ? ", " : "") << r.groups[g].key << " " << fmt(r.groups[g].worst_ratio);
        }
    };
    run_against({SuiteKind::Fs});
    run_against({SuiteKind::Thm12});
    run_against({SuiteKind::Cor13});
    run_against({SuiteKind::Thm14, SuiteKind::Cor15});
    Outcome o;
    o.passed = failures.empty();
    o.detail = "1000 trials each, side 32, seed 1; worst: " + worst.str() + "; " + std::to_string(failures.size()) +
               " failures" + (failures.empty() ? "" : " (first: " + failures.front() + ")") + "; " +
               fmt(seconds_since(t0)) + " s";
    return o;
}

// ---- log N sweep ----

Outcome log_sweep() {
    const auto t0 = Clock::now();
    const SweepResult s = sweep_directions({16, 32, 64, 128}, 50, 1, 32);
    std::vector<std::string> failures = s.invariant_failures;
    if (!s.slope || *s.slope < 0) failures.push_back("slope missing or negative");
    for (const auto& f : compare_sweep_baseline(s, read_text_file(kBaselines + "/sweep.json"))) failures.push_back(f);
    std::ostringstream pts;
    for (const auto& p : s.points) pts << (pts.tellp() > 0 ? ", " : "") << "N=" << p.N << " " << fmt(p.worst_ratio);
    Outcome o;
    o.passed = failures.empty();
    o.detail = "50 trials, side 32, worst ratio " + pts.str() + "; slope " + (s.slope ? fmt(*s.slope) : "none") +
               ", R^2 " + (s.r_squared ? fmt(*s.r_squared) : "none") + ", max worst/sqrt(log N) " +
               fmt(s.max_normalized) + "; " + std::to_string(failures.size()) + " failures" +
               (failures.empty() ? "" : " (first: " + failures.front() + ")") + "; " + fmt(seconds_since(t0)) + " s";
    return o;
}

// ---- analytic spot values ----

Outcome spot_values() {
    int checks = 0;
    std::vector<std::string> failures;
    auto expect = [&](const std::string& what, double got, double want) {
        ++checks;
        if (format_number(got) != format_number(want))
            failures.push_back(what + ": " + format_number(got) + " vs " + format_number(want));
    };
    for (int side : {8, 32}) {
        const Grid2D one(side, 1.0), zero(side, 0.0);
        const double n2 = double(side) * side;
        const std::string s = " side " + std::to_string(side);
        auto fs = verify_fs_classical(one, one, 0.5);
        expect("FS lhs" + s, fs.lhs, n2 / 2);
        expect("FS rhs" + s, fs.rhs, n2);
        expect("FS ratio" + s, fs.ratio, 0.5);
        expect("FS f=0" + s, verify_fs_classical(zero, one, 0.5).ratio, 0.0);
        auto t12 = verify_thm12(one, one, 0.5);
        expect("Thm1.2 lhs" + s, t12.lhs, n2);
        expect("Thm1.2 rhs" + s, t12.rhs, 2 * (1 + std::log(2.0)) * n2);
        expect("Thm1.2 ratio" + s, t12.ratio, 1 / (2 * (1 + std::log(2.0))));
        expect("Thm1.2 f=0" + s, verify_thm12(zero, one, 0.5).ratio, 0.0);
        for (double p : {1.5, 2.0, 4.0}) {
            expect("Cor1.3 ratio p=" + fmt(p) + s, verify_cor13(one, one, p).ratio, 1.0);
            expect("Cor1.3 f=0 p=" + fmt(p) + s, verify_cor13(zero, one, p).ratio, 0.0);
        }
        for (int N : {16, 64}) {
            auto t14 = verify_thm14(one, one, 0.5, N);
            expect("Thm1.4 lhs N=" + std::to_string(N) + s, t14.lhs, side / 2.0);
            expect("Thm1.4 rhs N=" + std::to_string(N) + s, t14.rhs, side);
            expect("Thm1.4 ratio N=" + std::to_string(N) + s, t14.ratio, 0.5);
            expect("Thm1.4 f=0 N=" + std::to_string(N) + s, verify_thm14(zero, one, 0.5, N).ratio, 0.0);
            for (double p : {3.0, 4.0}) {
                expect("Cor1.5 ratio p=" + fmt(p) + " N=" + std::to_string(N) + s, verify_cor15(one, one, p, N).ratio,
                       std::pow(std::log(double(N)), -1 / p));
                expect("Cor1.5 f=0 p=" + fmt(p) + " N=" + std::to_string(N) + s, verify_cor15(zero, one, p, N).ratio, 0.0);
            }
        }
        expect("Problem1.1 strong f=w=1" + s, problem11_strong(one, one, 2.0).ratio, 1.0);
    }
    Outcome o;
    o.passed = failures.empty();
    o.detail = std::to_string(checks) + " constant-input values at 12 significant digits; " +
               std::to_string(failures.size()) + " mismatches" + (failures.empty() ? "" : " (first: " + failures.front() + ")");
    return o;
}

// ---- determinism ----

Outcome determinism() {
    const auto t0 = Clock::now();
    const auto dir = std::filesystem::temp_directory_path() / ("maxlab_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto path = [&](const std::string& name) { return (dir / name).string(); };

    struct Command {
        std::string name;
        std::vector<std::string> args;  // output goes to {out}
    };
    const std::vector<Command> commands = {
        {"verify fs", {"verify", "fs", "--trials", "50", "--seed", "3", "--jsonl", "{out}"}},
        {"verify thm12", {"verify", "thm12", "--trials", "50", "--seed", "3", "--jsonl", "{out}"}},
        {"verify cor13", {"verify", "cor13", "--trials", "50", "--seed", "3", "--jsonl", "{out}"}},
        {"verify thm14", {"verify", "thm14", "--trials", "10", "--seed", "3", "--jsonl", "{out}"}},
        {"verify cor15", {"verify", "cor15", "--trials", "10", "--seed", "3", "--jsonl", "{out}"}},
        {"sweep-n", {"sweep-n", "--Ns", "16,32", "--trials", "5", "--seed", "3", "--out", "{out}"}},
        {"search-p11", {"search-p11", "--budget", "200", "--seed", "3", "--jsonl", "{out}"}},
        {"covering dyadic", {"covering", "--mode", "dyadic", "--random", "150", "--grid", "64", "--seed", "7", "--out", "{out}"}},
        {"covering directional",
         {"covering", "--mode", "directional", "--random", "40", "--N", "32", "--seed", "7", "--out", "{out}"}},
    };
    std::vector<std::string> failures;
    auto run_once = [&](const Command& c, const std::string& out) {
        std::vector<std::string> args = c.args;
        for (auto& a : args)
            if (a == "{out}") a = out;
        std::ostringstream so, se;
        const int code = cli::run(args, so, se);
        if (code != 0) failures.push_back(c.name + ": exit " + std::to_string(code) + " " + se.str());
        return read_text_file(out);
    };
    const int threads = max_threads();
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const std::string a = run_once(commands[i], path(std::to_string(i) + "a"));
        const std::string b = run_once(commands[i], path(std::to_string(i) + "b"));
        if (a.empty() || a != b) failures.push_back(commands[i].name + ": reruns differ");
        // A different worker count must not change the bytes either.
        set_max_threads(threads == 1 ? 3 : 1);
        const std::string c = run_once(commands[i], path(std::to_string(i) + "c"));
        set_max_threads(threads);
        if (a != c) failures.push_back(commands[i].name + ": output depends on the thread count");
    }
    std::filesystem::remove_all(dir);
    Outcome o;
    o.passed = failures.empty();
    o.detail = std::to_string(commands.size()) + " randomized commands run twice with the same seed and once with a " +
               "different thread count; " + std::to_string(failures.size()) + " differences" +
               (failures.empty() ? "" : " (first: " + failures.front() + ")") + "; " + fmt(seconds_since(t0)) + " s";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"dyadic covering suite", dyadic_covering},
        {"directional covering suite", directional_covering},
        {"inequality suites vs baselines", inequality_suites},
        {"log N sweep", log_sweep},
        {"analytic spot values", spot_values},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.passed) ++failed;
        std::printf("%s [PRIMARY] %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
