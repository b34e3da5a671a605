#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maxlab/grid.hpp"

namespace maxlab {

// ---- test functions ----

enum class FunctionKind { Constant, Spike, Disc, Cross, Block, Uniform };

std::string to_string(FunctionKind kind);

/// Input functions f. Forms: "constant:c", "spike:x,y,h", "disc:cx,cy,r,h"
/// (cells whose center lies within r of (cx, cy)), "cross:row,col,h",
/// "block:x0,x1,y0,y1,h" (half-open cell ranges), "uniform:seed=s,h=h"
/// (h times uniform [0,1) per cell, row-major).
struct FunctionSpec {
    FunctionKind kind = FunctionKind::Constant;
    double height = 1.0;
    double x = 0.0, y = 0.0, radius = 1.0;  // spike, disc; cross uses x as column, y as row
    int x0 = 0, x1 = 1, y0 = 0, y1 = 1;     // block
    std::uint64_t seed = 0;                 // uniform

    std::string describe() const;
};

FunctionSpec parse_function_spec(const std::string& text);
Grid2D make_function(const FunctionSpec& spec, int side);

// ---- reports ----

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::vector<std::pair<std::string, ParamValue>>;

struct InequalityReport {
    std::string tag;  // FS-classical | Thm1.2 | Cor1.3 | Thm1.4 | Cor1.5 | Problem1.1-ratio
    Params params;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::uint64_t seed = 0;
    int grid_side = 0;
    /// Weighted measure of the superlevel set behind a weak-type lhs; unset for
    /// strong-type reports. Not serialized.
    std::optional<double> level_measure;
};

/// 0/0 -> 0, x/0 -> +inf for x > 0.
double report_ratio(double lhs, double rhs);

/// One JSON object on one line; numbers rounded to 12 significant digits,
/// an infinite ratio written as the string "inf".
std::string report_to_json(const InequalityReport& r, const std::string& timestamp);

/// t w({M_Q f > t}) against sum f M_Q w.
InequalityReport verify_fs_classical(const Grid2D& f, const Grid2D& w, double t);
/// w({M_R f > t}) against sum (f/t)(1 + log+(f/t)) W, W = M_R M_Q w.
InequalityReport verify_thm12(const Grid2D& f, const Grid2D& w, double t);
/// ||M_R f||_{L^p(w)} against ||f||_{L^p(W)}, p > 1.
InequalityReport verify_cor13(const Grid2D& f, const Grid2D& w, double p);
/// t w({M_Sigma_N f > t})^(1/2) against ||f||_{L^2(W)}, W = M_Sigma_N M_Q w.
/// Directional fields use the default scale grid of the side.
InequalityReport verify_thm14(const Grid2D& f, const Grid2D& w, double t, int N);
/// ||M_Sigma_N f||_{L^p(w)} against (log N)^(1/p) ||f||_{L^p(W)}, p > 2.
InequalityReport verify_cor15(const Grid2D& f, const Grid2D& w, double p, int N);

/// The open question with M_R w in place of W. Weak form: w({M_R f > t})
/// against sum (f/t)(1 + log+(f/t)) M_R w. Strong form: ||M_R f||_{L^p(w)}
/// against ||f||_{L^p(M_R w)}.
InequalityReport problem11_weak(const Grid2D& f, const Grid2D& w, double t);
InequalityReport problem11_strong(const Grid2D& f, const Grid2D& w, double p);

// ---- suites ----

enum class SuiteKind { Fs, Thm12, Cor13, Thm14, Cor15 };

std::string suite_name(SuiteKind kind);  // fs, thm12, cor13, thm14, cor15
std::string suite_tag(SuiteKind kind);   // FS-classical, ...
SuiteKind parse_suite(const std::string& name);

/// Thresholds tried per trial, as fractions of max f.
inline constexpr double kThresholdFractions[] = {0.9, 0.6, 0.3, 0.1, 0.03};

struct SuiteConfig {
    std::vector<SuiteKind> kinds;
    int side = 32;
    int trials = 1000;
    std::uint64_t seed = 0;
    std::vector<double> ps;  // cor13 defaults to {1.5, 2, 4}, cor15 to {3, 4}
    std::vector<int> Ns;     // thm14 / cor15, default {16, 64}
};

/// One zoo draw: weight and function specs derived from (seed, trial).
struct Trial {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string weight;
    std::string function;
};

Trial make_trial(std::uint64_t suite_seed, std::size_t index, int side);

/// One summary row: the reports of one trial for one (tag, p, N) group.
struct SummaryRow {
    std::string tag;
    std::size_t trial = 0;
    std::string weight;
    std::string function;
    std::optional<double> p;
    std::optional<int> N;
    double worst_ratio = 0.0;
    double mean_ratio = 0.0;
    int reports = 0;
};

/// Worst ratio of one (tag, p, N) group over the whole suite.
struct GroupWorst {
    std::string key;  // e.g. "Cor1.3 p=2", "Thm1.4 N=64"
    double worst_ratio = 0.0;
};

struct SuiteResult {
    SuiteConfig config;
    std::vector<InequalityReport> reports;  // by trial, then kind, then p/N, then t
    std::vector<SummaryRow> rows;
    std::vector<GroupWorst> groups;
    std::vector<std::string> invariant_failures;
};

/// Trials run in parallel; output order depends only on trial indices.
/// Suite invariants: finite nonnegative sides; weak-type level measures
/// nonincreasing in t; w({M_R f > t}) >= w({M_Q f > t}); the Thm1.2 ratio
/// never exceeds the weak ratio with M_R w in place of W for the same (f, w, t).
SuiteResult run_suite(const SuiteConfig& config);

/// Columns: tag, trial, weight, function, p, N, worst_ratio, mean_ratio, trials.
std::string summary_csv(const SuiteResult& result);
std::string reports_jsonl(const std::vector<InequalityReport>& reports, const std::string& timestamp);

/// {"suite", "seed", "trials", "side", "worst": {key: ratio}}.
std::string baseline_json(const SuiteResult& result);
/// Failures for baseline groups whose worst ratio is exceeded by more than
/// 1e-9 or which the suite did not run; groups absent from the baseline are
/// not compared. Throws ParseError for a malformed file and PreconditionError when
/// the baseline was recorded with a different seed, trial count or side.
std::vector<std::string> compare_baseline(const SuiteResult& result, const std::string& baseline_text);

// ---- log N sweep ----

struct SweepPoint {
    int N = 0;
    double worst_ratio = 0.0;
    double log_n = 0.0;
    double normalized = 0.0;  // worst_ratio / sqrt(log N)
};

struct SweepResult {
    int side = 32;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<SweepPoint> points;
    /// Least-squares fit of worst_ratio^2 = slope log N + intercept; absent
    /// with fewer than two points.
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<double> r_squared;
    double max_normalized = 0.0;
    std::vector<std::string> invariant_failures;
};

/// Every N sees the same trials. Ns strictly increasing, each > 10.
SweepResult sweep_directions(const std::vector<int>& Ns, int trials, std::uint64_t seed, int side = 32);
/// Same over fixed (f, w) pairs of one side; seed is reported as 0.
SweepResult sweep_directions(const std::vector<int>& Ns, const std::vector<std::pair<Grid2D, Grid2D>>& inputs);
std::string sweep_to_json(const SweepResult& s);
SweepResult parse_sweep_json(const std::string& text);
/// Failures for points whose worst_ratio / sqrt(log N) exceeds the baseline's
/// max_normalized by more than 1e-9. PreconditionError when seed, trials, side
/// or the N list differ.
std::vector<std::string> compare_sweep_baseline(const SweepResult& s, const std::string& baseline_text);

// ---- search with M_R w in place of W ----

enum class P11Form { Weak, Strong };

struct P11SearchResult {
    InequalityReport best;
    Grid2D f;
    Grid2D w;
    int evaluations = 0;
    std::vector<double> history;  // best ratio after each evaluation
};

/// Half the budget samples zoo trials with random t or p, the rest
/// hill-climbs from the best point by log-normal perturbations of single
/// cells of f or w and of t or p. No claim beyond "largest ratio found".
P11SearchResult problem11_ratio_search(int budget, std::uint64_t seed, int side = 32, P11Form form = P11Form::Strong);

} // namespace maxlab
