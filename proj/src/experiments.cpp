#include "maxlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "maxlab/error.hpp"
#include "maxlab/grid_io.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/parallel.hpp"
#include "maxlab/rng.hpp"
#include "maxlab/spec_args.hpp"
#include "maxlab/weights.hpp"

namespace maxlab {

using ojson = nlohmann::ordered_json;

// ---- test functions ----

std::string to_string(FunctionKind kind) {
    switch (kind) {
    case FunctionKind::Constant: return "constant";
    case FunctionKind::Spike: return "spike";
    case FunctionKind::Disc: return "disc";
    case FunctionKind::Cross: return "cross";
    case FunctionKind::Block: return "block";
    case FunctionKind::Uniform: return "uniform";
    }
    return "unknown";
}

std::string FunctionSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << ':';
    switch (kind) {
    case FunctionKind::Constant: os << format_number(height); break;
    case FunctionKind::Spike:
        os << format_number(x) << ',' << format_number(y) << ",h=" << format_number(height);
        break;
    case FunctionKind::Disc:
        os << format_number(x) << ',' << format_number(y) << ",r=" << format_number(radius)
           << ",h=" << format_number(height);
        break;
    case FunctionKind::Cross:
        os << "row=" << format_number(y) << ",col=" << format_number(x) << ",h=" << format_number(height);
        break;
    case FunctionKind::Block:
        os << x0 << ',' << x1 << ',' << y0 << ',' << y1 << ",h=" << format_number(height);
        break;
    case FunctionKind::Uniform: os << "seed=" << seed << ",h=" << format_number(height); break;
    }
    return os.str();
}

FunctionSpec parse_function_spec(const std::string& text) {
    const SpecArgs a = SpecArgs::parse(text);
    FunctionSpec s;
    if (a.kind == "constant") {
        s.kind = FunctionKind::Constant;
        s.height = a.number("c", 0, 1.0);
    } else if (a.kind == "spike") {
        s.kind = FunctionKind::Spike;
        s.x = a.number("x", 0, 0.0);
        s.y = a.number("y", 1, 0.0);
        s.height = a.number("h", 2, 1.0);
    } else if (a.kind == "disc") {
        s.kind = FunctionKind::Disc;
        s.x = a.number("cx", 0, 0.0);
        s.y = a.number("cy", 1, 0.0);
        s.radius = a.number("r", 2, 1.0);
        s.height = a.number("h", 3, 1.0);
        if (!(s.radius > 0)) throw ParseError("disc function needs r > 0");
    } else if (a.kind == "cross") {
        s.kind = FunctionKind::Cross;
        s.y = a.number("row", 0, 0.0);
        s.x = a.number("col", 1, 0.0);
        s.height = a.number("h", 2, 1.0);
    } else if (a.kind == "block") {
        s.kind = FunctionKind::Block;
        s.x0 = static_cast<int>(a.number("x0", 0, 0.0));
        s.x1 = static_cast<int>(a.number("x1", 1, 1.0));
        s.y0 = static_cast<int>(a.number("y0", 2, 0.0));
        s.y1 = static_cast<int>(a.number("y1", 3, 1.0));
        s.height = a.number("h", 4, 1.0);
        if (s.x0 >= s.x1 || s.y0 >= s.y1) throw ParseError("block function needs x0 < x1 and y0 < y1");
    } else if (a.kind == "uniform") {
        s.kind = FunctionKind::Uniform;
        s.seed = a.unsigned_integer("seed", 0, 0);
        s.height = a.number("h", 1, 1.0);
    } else {
        throw ParseError("unknown function kind '" + a.kind + "'");
    }
    if (!(s.height >= 0) || !std::isfinite(s.height)) throw ParseError("function height must be finite and >= 0");
    return s;
}

Grid2D make_function(const FunctionSpec& s, int side) {
    Grid2D g(side);
    auto cell_index = [&](double v, const char* what) {
        const int i = static_cast<int>(std::floor(v));
        if (i < 0 || i >= side) throw BoundsError(std::string(what) + " " + format_number(v) + " outside the grid");
        return i;
    };
    switch (s.kind) {
    case FunctionKind::Constant: return Grid2D(side, s.height);
    case FunctionKind::Spike: g.set(cell_index(s.x, "spike x"), cell_index(s.y, "spike y"), s.height); return g;
    case FunctionKind::Disc:
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                if (std::hypot(x + 0.5 - s.x, y + 0.5 - s.y) <= s.radius) g.set(x, y, s.height);
        return g;
    case FunctionKind::Cross: {
        const int row = cell_index(s.y, "cross row"), col = cell_index(s.x, "cross column");
        for (int i = 0; i < side; ++i) {
            g.set(i, row, s.height);
            g.set(col, i, s.height);
        }
        return g;
    }
    case FunctionKind::Block:
        if (s.x0 < 0 || s.y0 < 0 || s.x1 > side || s.y1 > side) throw BoundsError("block outside the grid");
        for (int y = s.y0; y < s.y1; ++y)
            for (int x = s.x0; x < s.x1; ++x) g.set(x, y, s.height);
        return g;
    case FunctionKind::Uniform: {
        Rng rng(s.seed);
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) g.set(x, y, s.height * rng.uniform());
        return g;
    }
    }
    return g;
}

// ---- reports ----

double report_ratio(double lhs, double rhs) {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

namespace {

ojson number_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return round12(v);
}

ojson params_json(const Params& params) {
    ojson j = ojson::object();
    for (const auto& [key, value] : params) {
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, double>) j[key] = number_json(v);
                else j[key] = v;
            },
            value);
    }
    return j;
}

double max_cell(const Grid2D& g) { return *std::max_element(g.cells().begin(), g.cells().end()); }

void require_positive_t(double t) {
    if (!(t > 0) || !std::isfinite(t)) throw ThresholdError("threshold t must be positive, got " + format_number(t));
}

void require_n(int N) {
    if (N <= 10) throw PreconditionError("directional inequalities need N > 10, got " + std::to_string(N));
}

void require_same_side(const Grid2D& f, const Grid2D& w) {
    if (f.side() != w.side()) throw BoundsError("f and w have different sides");
}

using PlanMap = std::map<int, DirectionalPlan>;

PlanMap make_plans(const std::vector<int>& Ns, int side) {
    PlanMap plans;
    const auto scales = default_scale_grid(side);
    for (int N : Ns) plans.emplace(N, DirectionalPlan(side, DirectionSet(N), scales));
    return plans;
}

/// Maximal fields of one (f, w) pair, computed on first use. Directional
/// fields use `plans` when it has the N, else a plan built here.
class Fields {
public:
    Fields(const Grid2D& f, const Grid2D& w, const PlanMap* plans = nullptr) : f_(f), w_(w), plans_(plans) {
        require_same_side(f, w);
    }

    const Grid2D& f() const { return f_; }
    const Grid2D& w() const { return w_; }
    const Grid2D& mq_f() { return lazy(mq_f_, [&] { return hl_maximal_values(f_, false); }); }
    const Grid2D& mq_w() { return lazy(mq_w_, [&] { return hl_maximal_values(w_, false); }); }
    const Grid2D& mr_f() { return lazy(mr_f_, [&] { return strong_maximal_values(f_); }); }
    const Grid2D& mr_w() { return lazy(mr_w_, [&] { return strong_maximal_values(w_); }); }
    const Grid2D& W_strong() { return lazy(W_strong_, [&] { return strong_maximal_values(mq_w()); }); }

    const Grid2D& ms_f(int N) {
        auto it = ms_f_.find(N);
        if (it == ms_f_.end()) it = ms_f_.emplace(N, plan(N).apply(f_).values).first;
        return it->second;
    }
    const Grid2D& W_directional(int N) {
        auto it = W_dir_.find(N);
        if (it == W_dir_.end()) it = W_dir_.emplace(N, plan(N).apply(mq_w()).values).first;
        return it->second;
    }

private:
    template <class Fn>
    const Grid2D& lazy(std::optional<Grid2D>& slot, Fn&& fn) {
        if (!slot) slot = fn();
        return *slot;
    }

    const DirectionalPlan& plan(int N) {
        if (plans_) {
            if (auto it = plans_->find(N); it != plans_->end()) return it->second;
        }
        auto it = own_plans_.find(N);
        if (it == own_plans_.end())
            it = own_plans_.emplace(N, DirectionalPlan(f_.side(), DirectionSet(N), default_scale_grid(f_.side()))).first;
        return it->second;
    }

    const Grid2D& f_;
    const Grid2D& w_;
    const PlanMap* plans_;
    PlanMap own_plans_;
    std::optional<Grid2D> mq_f_, mq_w_, mr_f_, mr_w_, W_strong_;
    std::map<int, Grid2D> ms_f_, W_dir_;
};

/// sum a b for nonnegative a, b.
double weighted_sum(const Grid2D& a, const Grid2D& b) { return lp_norm(a, b, 1.0); }

InequalityReport make_report(std::string tag, Params params, double lhs, double rhs, int side) {
    InequalityReport r;
    r.tag = std::move(tag);
    r.params = std::move(params);
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = report_ratio(lhs, rhs);
    r.grid_side = side;
    return r;
}

InequalityReport fs_report(Fields& F, double t) {
    require_positive_t(t);
    const double level = superlevel_measure(F.w(), F.mq_f(), t);
    auto r = make_report("FS-classical", {{"t", t}}, t * level, weighted_sum(F.f(), F.mq_w()), F.f().side());
    r.level_measure = level;
    return r;
}

InequalityReport thm12_report(Fields& F, double t) {
    require_positive_t(t);
    const double level = superlevel_measure(F.w(), F.mr_f(), t);
    auto r = make_report("Thm1.2", {{"t", t}}, level, llogl_functional(F.f(), F.W_strong(), t), F.f().side());
    r.level_measure = level;
    return r;
}

InequalityReport cor13_report(Fields& F, double p) {
    if (!(p > 1)) throw ExponentError("Cor1.3 needs p > 1, got " + format_number(p));
    return make_report("Cor1.3", {{"p", p}}, lp_norm(F.mr_f(), F.w(), p), lp_norm(F.f(), F.W_strong(), p),
                       F.f().side());
}

InequalityReport thm14_report(Fields& F, double t, int N) {
    require_positive_t(t);
    require_n(N);
    const double level = superlevel_measure(F.w(), F.ms_f(N), t);
    auto r = make_report("Thm1.4", {{"t", t}, {"N", std::int64_t{N}}}, t * std::sqrt(level),
                         lp_norm(F.f(), F.W_directional(N), 2.0), F.f().side());
    r.params.emplace_back("ratio_sq_over_log_n", r.ratio * r.ratio / std::log(double(N)));
    r.level_measure = level;
    return r;
}

InequalityReport cor15_report(Fields& F, double p, int N) {
    if (!(p > 2)) throw ExponentError("Cor1.5 needs p > 2, got " + format_number(p));
    require_n(N);
    return make_report("Cor1.5", {{"p", p}, {"N", std::int64_t{N}}}, lp_norm(F.ms_f(N), F.w(), p),
                       std::pow(std::log(double(N)), 1.0 / p) * lp_norm(F.f(), F.W_directional(N), p),
                       F.f().side());
}

InequalityReport p11_weak_report(Fields& F, double t) {
    require_positive_t(t);
    const double level = superlevel_measure(F.w(), F.mr_f(), t);
    auto r = make_report("Problem1.1-ratio", {{"form", std::string("weak")}, {"t", t}}, level,
                         llogl_functional(F.f(), F.mr_w(), t), F.f().side());
    r.level_measure = level;
    return r;
}

InequalityReport p11_strong_report(Fields& F, double p) {
    if (!(p > 1)) throw ExponentError("the M_R w strong form needs p > 1, got " + format_number(p));
    return make_report("Problem1.1-ratio", {{"form", std::string("strong")}, {"p", p}}, lp_norm(F.mr_f(), F.w(), p),
                       lp_norm(F.f(), F.mr_w(), p), F.f().side());
}

} // namespace

std::string report_to_json(const InequalityReport& r, const std::string& timestamp) {
    ojson j;
    j["tag"] = r.tag;
    j["params"] = params_json(r.params);
    j["lhs"] = number_json(r.lhs);
    j["rhs"] = number_json(r.rhs);
    j["ratio"] = number_json(r.ratio);
    j["seed"] = r.seed;
    j["grid_side"] = r.grid_side;
    j["timestamp"] = timestamp;
    return j.dump();
}

InequalityReport verify_fs_classical(const Grid2D& f, const Grid2D& w, double t) {
    Fields F(f, w);
    return fs_report(F, t);
}

InequalityReport verify_thm12(const Grid2D& f, const Grid2D& w, double t) {
    Fields F(f, w);
    return thm12_report(F, t);
}

InequalityReport verify_cor13(const Grid2D& f, const Grid2D& w, double p) {
    Fields F(f, w);
    return cor13_report(F, p);
}

InequalityReport verify_thm14(const Grid2D& f, const Grid2D& w, double t, int N) {
    require_n(N);
    require_positive_t(t);
    Fields F(f, w);
    return thm14_report(F, t, N);
}

InequalityReport verify_cor15(const Grid2D& f, const Grid2D& w, double p, int N) {
    require_n(N);
    if (!(p > 2)) throw ExponentError("Cor1.5 needs p > 2, got " + format_number(p));
    Fields F(f, w);
    return cor15_report(F, p, N);
}

InequalityReport problem11_weak(const Grid2D& f, const Grid2D& w, double t) {
    Fields F(f, w);
    return p11_weak_report(F, t);
}

InequalityReport problem11_strong(const Grid2D& f, const Grid2D& w, double p) {
    Fields F(f, w);
    return p11_strong_report(F, p);
}

// ---- suites ----

std::string suite_name(SuiteKind kind) {
    switch (kind) {
    case SuiteKind::Fs: return "fs";
    case SuiteKind::Thm12: return "thm12";
    case SuiteKind::Cor13: return "cor13";
    case SuiteKind::Thm14: return "thm14";
    case SuiteKind::Cor15: return "cor15";
    }
    return "unknown";
}

std::string suite_tag(SuiteKind kind) {
    switch (kind) {
    case SuiteKind::Fs: return "FS-classical";
    case SuiteKind::Thm12: return "Thm1.2";
    case SuiteKind::Cor13: return "Cor1.3";
    case SuiteKind::Thm14: return "Thm1.4";
    case SuiteKind::Cor15: return "Cor1.5";
    }
    return "unknown";
}

SuiteKind parse_suite(const std::string& name) {
    for (auto k : {SuiteKind::Fs, SuiteKind::Thm12, SuiteKind::Cor13, SuiteKind::Thm14, SuiteKind::Cor15})
        if (suite_name(k) == name) return k;
    throw ParseError("unknown suite '" + name + "'");
}

Trial make_trial(std::uint64_t suite_seed, std::size_t index, int side) {
    Trial t;
    t.index = index;
    t.seed = derive_seed(suite_seed, index);
    Rng rng(t.seed);
    auto cell = [&] { return static_cast<int>(rng.uniform_int(0, side - 1)); };

    WeightSpec w;
    switch (rng.uniform_int(0, 4)) {
    case 0:
        w.kind = WeightKind::Constant;
        w.value = round12(std::exp(rng.uniform(-2.0, 2.0)));
        break;
    case 1:
        w.kind = WeightKind::Checkerboard;
        w.low = round12(std::exp(rng.uniform(-3.0, 3.0)));
        w.high = round12(std::exp(rng.uniform(-3.0, 3.0)));
        break;
    case 2:
        w.kind = WeightKind::Power;
        w.exponent = round12(rng.uniform(-1.9, 3.0));
        w.center_x = static_cast<double>(rng.uniform_int(0, side));
        w.center_y = static_cast<double>(rng.uniform_int(0, side));
        break;
    case 3: {
        w.kind = WeightKind::Spike;
        w.spike_x = cell();
        w.spike_y = cell();
        const double eps[] = {1e-3, 1e-6, 1e-9};
        w.epsilon = eps[rng.uniform_int(0, 2)];
        break;
    }
    default:
        w.kind = WeightKind::Lognormal;
        w.seed = rng.bits() >> 1;
        w.sigma = round12(rng.uniform(0.5, 2.0));
        break;
    }
    t.weight = w.describe();

    FunctionSpec f;
    f.height = round12(std::exp(rng.uniform(-1.0, 3.0)));
    switch (rng.uniform_int(0, 5)) {
    case 0: f.kind = FunctionKind::Constant; break;
    case 1:
        f.kind = FunctionKind::Spike;
        f.x = cell();
        f.y = cell();
        break;
    case 2:
        f.kind = FunctionKind::Disc;
        f.x = round12(rng.uniform(0.0, side));
        f.y = round12(rng.uniform(0.0, side));
        f.radius = round12(rng.uniform(0.5, side / 4.0));
        break;
    case 3:
        f.kind = FunctionKind::Cross;
        f.x = cell();
        f.y = cell();
        break;
    case 4: {
        f.kind = FunctionKind::Block;
        const int wx = 1 << rng.uniform_int(0, log2_exact(side) - 1);
        const int wy = 1 << rng.uniform_int(0, log2_exact(side) - 1);
        f.x0 = static_cast<int>(rng.uniform_int(0, side - wx));
        f.y0 = static_cast<int>(rng.uniform_int(0, side - wy));
        f.x1 = f.x0 + wx;
        f.y1 = f.y0 + wy;
        break;
    }
    default:
        f.kind = FunctionKind::Uniform;
        f.seed = rng.bits() >> 1;
        break;
    }
    t.function = f.describe();
    return t;
}

namespace {

std::vector<double> ps_for(const SuiteConfig& c, SuiteKind k) {
    if (!c.ps.empty()) return c.ps;
    return k == SuiteKind::Cor13 ? std::vector<double>{1.5, 2.0, 4.0} : std::vector<double>{3.0, 4.0};
}

std::vector<int> ns_for(const SuiteConfig& c) { return c.Ns.empty() ? std::vector<int>{16, 64} : c.Ns; }

std::vector<double> thresholds(const Grid2D& f) {
    double top = max_cell(f);
    if (top == 0.0) top = 1.0;
    std::vector<double> ts;
    for (double q : kThresholdFractions) ts.push_back(q * top);
    return ts;
}

std::string group_key(const std::string& tag, std::optional<double> p, std::optional<int> N) {
    std::string key = tag;
    if (p) key += " p=" + format_number(*p);
    if (N) key += " N=" + std::to_string(*N);
    return key;
}

struct TrialOutput {
    std::vector<InequalityReport> reports;
    std::vector<SummaryRow> rows;
    std::vector<std::string> failures;
};

bool close_leq(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_monotone(const std::vector<InequalityReport>& block, const Trial& trial, std::vector<std::string>& out) {
    // Thresholds decrease along the block, so level sets must grow.
    for (std::size_t i = 1; i < block.size(); ++i) {
        if (!close_leq(*block[i - 1].level_measure, *block[i].level_measure)) {
            out.push_back(block[i].tag + " trial " + std::to_string(trial.index) +
                          ": level measure not monotone in t");
        }
    }
}

void check_report(const InequalityReport& r, const Trial& trial, std::vector<std::string>& out) {
    if (!(r.lhs >= 0) || !(r.rhs >= 0) || !std::isfinite(r.lhs) || !std::isfinite(r.rhs) || !std::isfinite(r.ratio))
        out.push_back(r.tag + " trial " + std::to_string(trial.index) + ": non-finite or negative report");
}

SummaryRow summarize(const std::vector<InequalityReport>& block, const Trial& trial, std::optional<double> p,
                     std::optional<int> N) {
    SummaryRow row;
    row.tag = block.front().tag;
    row.trial = trial.index;
    row.weight = trial.weight;
    row.function = trial.function;
    row.p = p;
    row.N = N;
    double sum = 0.0;
    for (const auto& r : block) {
        row.worst_ratio = std::max(row.worst_ratio, r.ratio);
        sum += r.ratio;
    }
    row.reports = static_cast<int>(block.size());
    row.mean_ratio = sum / block.size();
    return row;
}

void stamp(std::vector<InequalityReport>& block, const Trial& trial) {
    for (auto& r : block) {
        r.seed = trial.seed;
        Params head{{"trial", static_cast<std::int64_t>(trial.index)},
                    {"weight", trial.weight},
                    {"function", trial.function}};
        r.params.insert(r.params.begin(), head.begin(), head.end());
    }
}

TrialOutput run_trial(const SuiteConfig& c, const Trial& trial, const PlanMap& plans) {
    TrialOutput out;
    const Grid2D f = make_function(parse_function_spec(trial.function), c.side);
    const Grid2D w = make_weight(parse_weight_spec(trial.weight), c.side);
    Fields F(f, w, &plans);
    const auto ts = thresholds(f);

    auto emit = [&](std::vector<InequalityReport> block, std::optional<double> p, std::optional<int> N) {
        for (const auto& r : block) check_report(r, trial, out.failures);
        if (block.front().level_measure) check_monotone(block, trial, out.failures);
        stamp(block, trial);
        out.rows.push_back(summarize(block, trial, p, N));
        out.reports.insert(out.reports.end(), block.begin(), block.end());
    };

    for (const SuiteKind kind : c.kinds) {
        switch (kind) {
        case SuiteKind::Fs: {
            std::vector<InequalityReport> block;
            for (double t : ts) block.push_back(fs_report(F, t));
            emit(std::move(block), {}, {});
            break;
        }
        case SuiteKind::Thm12: {
            std::vector<InequalityReport> block;
            for (double t : ts) {
                auto r = thm12_report(F, t);
                const double fs_level = superlevel_measure(w, F.mq_f(), t);
                if (!close_leq(fs_level, *r.level_measure))
                    out.failures.push_back("Thm1.2 trial " + std::to_string(trial.index) +
                                           ": w({M_R f > t}) below w({M_Q f > t})");
                const auto p11 = p11_weak_report(F, t);
                if (!close_leq(r.ratio, p11.ratio))
                    out.failures.push_back("Thm1.2 trial " + std::to_string(trial.index) +
                                           ": ratio with W exceeds ratio with M_R w");
                block.push_back(std::move(r));
            }
            emit(std::move(block), {}, {});
            break;
        }
        case SuiteKind::Cor13:
            for (double p : ps_for(c, kind)) emit({cor13_report(F, p)}, p, {});
            break;
        case SuiteKind::Thm14:
            for (int N : ns_for(c)) {
                std::vector<InequalityReport> block;
                for (double t : ts) block.push_back(thm14_report(F, t, N));
                emit(std::move(block), {}, N);
            }
            break;
        case SuiteKind::Cor15:
            for (int N : ns_for(c))
                for (double p : ps_for(c, kind)) emit({cor15_report(F, p, N)}, p, N);
            break;
        }
    }
    return out;
}

void validate(const SuiteConfig& c) {
    if (c.kinds.empty()) throw PreconditionError("suite needs at least one inequality");
    if (c.trials < 1) throw PreconditionError("suite needs trials >= 1");
    if (!is_power_of_two(c.side) || c.side < 2) throw GeometryError("suite side must be a power of two >= 2");
    for (SuiteKind k : c.kinds) {
        if (k == SuiteKind::Thm14 || k == SuiteKind::Cor15)
            for (int N : ns_for(c)) require_n(N);
        if (k == SuiteKind::Cor13)
            for (double p : ps_for(c, k))
                if (!(p > 1)) throw ExponentError("Cor1.3 needs p > 1, got " + format_number(p));
        if (k == SuiteKind::Cor15)
            for (double p : ps_for(c, k))
                if (!(p > 2)) throw ExponentError("Cor1.5 needs p > 2, got " + format_number(p));
    }
}

} // namespace

SuiteResult run_suite(const SuiteConfig& config) {
    validate(config);
    bool directional = false;
    for (SuiteKind k : config.kinds) directional = directional || k == SuiteKind::Thm14 || k == SuiteKind::Cor15;
    const PlanMap plans = directional ? make_plans(ns_for(config), config.side) : PlanMap{};
    std::vector<TrialOutput> slots(static_cast<std::size_t>(config.trials));
    parallel_for(slots.size(),
                 [&](std::size_t i) { slots[i] = run_trial(config, make_trial(config.seed, i, config.side), plans); });

    SuiteResult res;
    res.config = config;
    std::vector<std::string> order;
    std::map<std::string, double> worst;
    for (auto& s : slots) {
        for (auto& r : s.reports) res.reports.push_back(std::move(r));
        for (auto& row : s.rows) {
            const std::string key = group_key(row.tag, row.p, row.N);
            if (!worst.count(key)) order.push_back(key);
            worst[key] = std::max(worst[key], row.worst_ratio);
            res.rows.push_back(std::move(row));
        }
        for (auto& f : s.failures) res.invariant_failures.push_back(std::move(f));
    }
    for (const auto& key : order) res.groups.push_back({key, worst[key]});
    return res;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string summary_csv(const SuiteResult& result) {
    std::ostringstream os;
    os << "tag,trial,weight,function,p,N,worst_ratio,mean_ratio,trials\n";
    for (const auto& r : result.rows) {
        os << r.tag << ',' << r.trial << ',' << csv_field(r.weight) << ',' << csv_field(r.function) << ','
           << (r.p ? format_number(*r.p) : "") << ',' << (r.N ? std::to_string(*r.N) : "") << ','
           << format_number(r.worst_ratio) << ',' << format_number(r.mean_ratio) << ',' << r.reports << '\n';
    }
    return os.str();
}

std::string reports_jsonl(const std::vector<InequalityReport>& reports, const std::string& timestamp) {
    std::string out;
    for (const auto& r : reports) out += report_to_json(r, timestamp) + '\n';
    return out;
}

namespace {

std::string suite_label(const SuiteConfig& c) {
    std::string s;
    for (auto k : c.kinds) s += (s.empty() ? "" : "+") + suite_name(k);
    return s;
}

} // namespace

std::string baseline_json(const SuiteResult& result) {
    ojson j;
    j["suite"] = suite_label(result.config);
    j["seed"] = result.config.seed;
    j["trials"] = result.config.trials;
    j["side"] = result.config.side;
    ojson worst = ojson::object();
    for (const auto& g : result.groups) worst[g.key] = number_json(g.worst_ratio);
    j["worst"] = worst;
    return j.dump(2) + "\n";
}

std::vector<std::string> compare_baseline(const SuiteResult& result, const std::string& baseline_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(baseline_text);
        if (j.at("seed").get<std::uint64_t>() != result.config.seed || j.at("trials").get<int>() != result.config.trials ||
            j.at("side").get<int>() != result.config.side) {
            throw PreconditionError("baseline was recorded with a different seed, trial count or side");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed baseline: ") + e.what());
    }
    std::vector<std::string> failures;
    std::vector<std::string> missing;
    int matched = 0;
    for (const auto& [key, b] : j.at("worst").items()) {
        const auto g = std::find_if(result.groups.begin(), result.groups.end(),
                                    [&](const GroupWorst& x) { return x.key == key; });
        if (g == result.groups.end()) {
            missing.push_back(key + ": recorded in the baseline but not run");
            continue;
        }
        ++matched;
        const double base = b.is_string() ? std::numeric_limits<double>::infinity() : b.get<double>();
        if (g->worst_ratio > base + 1e-9) {
            failures.push_back(g->key + ": worst ratio " + format_number(g->worst_ratio) + " above baseline " +
                               format_number(base));
        }
    }
    if (matched == 0) throw PreconditionError("baseline shares no group with this suite");
    failures.insert(failures.end(), missing.begin(), missing.end());
    return failures;
}

// ---- log N sweep ----

namespace {

void check_ns(const std::vector<int>& Ns) {
    if (Ns.empty()) throw PreconditionError("sweep needs at least one N");
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        require_n(Ns[i]);
        if (i > 0 && Ns[i] <= Ns[i - 1]) throw PreconditionError("sweep Ns must be strictly increasing");
    }
}

SweepResult fit_sweep(const std::vector<int>& Ns, const std::vector<std::vector<double>>& worst, int side) {
    SweepResult s;
    s.side = side;
    s.trials = static_cast<int>(worst.size());
    for (std::size_t k = 0; k < Ns.size(); ++k) {
        SweepPoint pt;
        pt.N = Ns[k];
        for (const auto& row : worst) pt.worst_ratio = std::max(pt.worst_ratio, row[k]);
        pt.log_n = std::log(double(pt.N));
        pt.normalized = pt.worst_ratio / std::sqrt(pt.log_n);
        if (!std::isfinite(pt.worst_ratio)) s.invariant_failures.push_back("N=" + std::to_string(pt.N) + ": infinite ratio");
        s.max_normalized = std::max(s.max_normalized, pt.normalized);
        s.points.push_back(pt);
    }
    if (s.points.size() >= 2) {
        const double n = double(s.points.size());
        double mx = 0, my = 0;
        for (const auto& p : s.points) {
            mx += p.log_n / n;
            my += p.worst_ratio * p.worst_ratio / n;
        }
        double sxx = 0, sxy = 0, syy = 0;
        for (const auto& p : s.points) {
            const double dx = p.log_n - mx, dy = p.worst_ratio * p.worst_ratio - my;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        s.slope = sxy / sxx;
        s.intercept = my - *s.slope * mx;
        double ss_res = 0;
        for (const auto& p : s.points) {
            const double e = p.worst_ratio * p.worst_ratio - (*s.slope * p.log_n + *s.intercept);
            ss_res += e * e;
        }
        // A flat series is fit exactly.
        s.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    }
    return s;
}

} // namespace

SweepResult sweep_directions(const std::vector<int>& Ns, int trials, std::uint64_t seed, int side) {
    check_ns(Ns);
    if (trials < 1) throw PreconditionError("sweep needs trials >= 1");
    const PlanMap plans = make_plans(Ns, side);
    std::vector<std::vector<double>> worst(static_cast<std::size_t>(trials), std::vector<double>(Ns.size(), 0.0));
    parallel_for(worst.size(), [&](std::size_t i) {
        const Trial trial = make_trial(seed, i, side);
        const Grid2D f = make_function(parse_function_spec(trial.function), side);
        const Grid2D w = make_weight(parse_weight_spec(trial.weight), side);
        Fields F(f, w, &plans);
        for (std::size_t k = 0; k < Ns.size(); ++k)
            for (double t : thresholds(f)) worst[i][k] = std::max(worst[i][k], thm14_report(F, t, Ns[k]).ratio);
    });
    SweepResult s = fit_sweep(Ns, worst, side);
    s.seed = seed;
    return s;
}

SweepResult sweep_directions(const std::vector<int>& Ns, const std::vector<std::pair<Grid2D, Grid2D>>& inputs) {
    check_ns(Ns);
    if (inputs.empty()) throw PreconditionError("sweep needs trials >= 1");
    const int side = inputs.front().first.side();
    const PlanMap plans = make_plans(Ns, side);
    std::vector<std::vector<double>> worst(inputs.size(), std::vector<double>(Ns.size(), 0.0));
    parallel_for(worst.size(), [&](std::size_t i) {
        Fields F(inputs[i].first, inputs[i].second, &plans);
        for (std::size_t k = 0; k < Ns.size(); ++k)
            for (double t : thresholds(inputs[i].first))
                worst[i][k] = std::max(worst[i][k], thm14_report(F, t, Ns[k]).ratio);
    });
    return fit_sweep(Ns, worst, side);
}

std::string sweep_to_json(const SweepResult& s) {
    ojson j;
    j["kind"] = "sweep-n";
    j["side"] = s.side;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    ojson pts = ojson::array();
    for (const auto& p : s.points) {
        ojson e;
        e["N"] = p.N;
        e["log_n"] = number_json(p.log_n);
        e["worst_ratio"] = number_json(p.worst_ratio);
        e["worst_ratio_sq"] = number_json(p.worst_ratio * p.worst_ratio);
        e["normalized"] = number_json(p.normalized);
        pts.push_back(e);
    }
    j["points"] = pts;
    j["slope"] = s.slope ? number_json(*s.slope) : ojson(nullptr);
    j["intercept"] = s.intercept ? number_json(*s.intercept) : ojson(nullptr);
    j["r_squared"] = s.r_squared ? number_json(*s.r_squared) : ojson(nullptr);
    j["max_normalized"] = number_json(s.max_normalized);
    j["invariant_failures"] = s.invariant_failures;
    return j.dump(2) + "\n";
}

SweepResult parse_sweep_json(const std::string& text) {
    SweepResult s;
    try {
        const auto j = nlohmann::json::parse(text);
        auto num = [](const nlohmann::json& v) {
            return v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>();
        };
        s.side = j.at("side").get<int>();
        s.trials = j.at("trials").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& p : j.at("points")) {
            s.points.push_back({p.at("N").get<int>(), num(p.at("worst_ratio")), num(p.at("log_n")),
                                num(p.at("normalized"))});
        }
        if (!j.at("slope").is_null()) s.slope = num(j["slope"]);
        if (!j.at("intercept").is_null()) s.intercept = num(j["intercept"]);
        if (!j.at("r_squared").is_null()) s.r_squared = num(j["r_squared"]);
        s.max_normalized = num(j.at("max_normalized"));
        s.invariant_failures = j.at("invariant_failures").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed sweep file: ") + e.what());
    }
    return s;
}

std::vector<std::string> compare_sweep_baseline(const SweepResult& s, const std::string& baseline_text) {
    const SweepResult base = parse_sweep_json(baseline_text);
    bool same_ns = base.points.size() == s.points.size();
    for (std::size_t k = 0; same_ns && k < s.points.size(); ++k) same_ns = base.points[k].N == s.points[k].N;
    if (base.seed != s.seed || base.trials != s.trials || base.side != s.side || !same_ns)
        throw PreconditionError("sweep baseline was recorded with a different seed, trial count, side or N list");
    std::vector<std::string> failures;
    for (const auto& p : s.points) {
        if (p.normalized > base.max_normalized + 1e-9) {
            failures.push_back("N=" + std::to_string(p.N) + ": worst/sqrt(log N) " + format_number(p.normalized) +
                               " above baseline " + format_number(base.max_normalized));
        }
    }
    return failures;
}

// ---- search with M_R w in place of W ----

namespace {

struct Candidate {
    Grid2D f, w;
    double param = 2.0;  // p (strong) or t (weak)
    InequalityReport report;
};

InequalityReport evaluate(const Grid2D& f, const Grid2D& w, double param, P11Form form) {
    return form == P11Form::Strong ? problem11_strong(f, w, param) : problem11_weak(f, w, param);
}

bool better(const InequalityReport& a, const InequalityReport& b) { return a.ratio > b.ratio; }

} // namespace

P11SearchResult problem11_ratio_search(int budget, std::uint64_t seed, int side, P11Form form) {
    if (budget < 1) throw PreconditionError("search budget must be >= 1");
    const int random_phase = std::max(1, budget / 2);

    std::vector<Candidate> sampled(static_cast<std::size_t>(random_phase));
    parallel_for(sampled.size(), [&](std::size_t i) {
        const Trial trial = make_trial(seed, i, side);
        Rng rng(derive_seed(trial.seed, 1));
        Candidate c{make_function(parse_function_spec(trial.function), side),
                    make_weight(parse_weight_spec(trial.weight), side), 2.0, {}};
        const double top = std::max(max_cell(c.f), 1e-300);
        c.param = form == P11Form::Strong ? round12(rng.uniform(1.1, 4.0))
                                          : round12(top * std::exp(rng.uniform(std::log(0.01), 0.0)));
        c.report = evaluate(c.f, c.w, c.param, form);
        c.report.params.insert(c.report.params.begin(), {{"origin", std::string("trial")},
                                                         {"trial", static_cast<std::int64_t>(i)},
                                                         {"weight", trial.weight},
                                                         {"function", trial.function}});
        c.report.seed = trial.seed;
        sampled[i] = std::move(c);
    });

    P11SearchResult res;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        if (better(sampled[i].report, sampled[best_i].report)) best_i = i;
        res.history.push_back(sampled[best_i].report.ratio);
    }
    Candidate best = std::move(sampled[best_i]);
    res.evaluations = random_phase;

    Rng rng(derive_seed(seed, 0xC11));
    for (int step = random_phase; step < budget; ++step) {
        Candidate next{best.f, best.w, best.param, {}};
        const auto move = rng.uniform_int(0, 2);
        if (move == 2) {
            next.param = form == P11Form::Strong ? std::clamp(next.param * std::exp(0.1 * rng.normal()), 1.01, 8.0)
                                                 : next.param * std::exp(0.3 * rng.normal());
        } else {
            Grid2D& g = move == 0 ? next.f : next.w;
            const int x = static_cast<int>(rng.uniform_int(0, side - 1));
            const int y = static_cast<int>(rng.uniform_int(0, side - 1));
            double v = g(x, y);
            if (rng.coin() && v > 0) v *= std::exp(rng.normal());
            else v = rng.uniform(0.0, 2.0 * std::max(max_cell(g), 1e-12));
            g.set(x, y, v);
        }
        ++res.evaluations;
        next.report = evaluate(next.f, next.w, next.param, form);
        if (better(next.report, best.report)) {
            next.report.params.insert(next.report.params.begin(),
                                      {{"origin", std::string("hill-climb")}, {"step", std::int64_t{step}}});
            next.report.seed = seed;
            best = std::move(next);
        }
        res.history.push_back(best.report.ratio);
    }
    res.best = best.report;
    res.best.params.emplace_back("budget", std::int64_t{budget});
    res.f = std::move(best.f);
    res.w = std::move(best.w);
    return res;
}

} // namespace maxlab
