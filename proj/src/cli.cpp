#include "maxlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "maxlab/covering.hpp"
#include "maxlab/error.hpp"
#include "maxlab/experiments.hpp"
#include "maxlab/grid_io.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/weights.hpp"

namespace maxlab::cli {

namespace {

struct Options {
    // compute / make-weight
    std::string op;
    bool dyadic = false;
    std::string input;
    std::string out;
    std::string backend = "double";
    std::string weight;
    std::string scales;
    int refinement = 1;
    // covering
    std::string mode;
    std::string family;
    int random_count = 0;
    std::string check = "all";
    std::string save_family;
    // verify and friends
    std::string suite;
    int grid = 32;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::vector<double> ps;
    std::vector<int> Ns;
    std::string jsonl;
    std::string csv;
    std::string baseline;
    std::string write_baseline;
    std::string timestamp = "1970-01-01T00:00:00Z";
    std::string form = "strong";
    int budget = 2000;
    std::string f_out;
    std::string w_out;
};

/// Files are collected here and written after the command has finished computing.
struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;
    void add(const std::string& path, std::string text) { files.emplace_back(path, std::move(text)); }
    void add_grid(const std::string& path, const Grid2D& g, const Metadata& meta) {
        const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
        if (json) {
            add(path, grid_to_json(g, meta));
        } else {
            std::ostringstream os;
            write_grid_csv(os, g, meta);
            add(path, os.str());
        }
    }
    void flush() const {
        for (const auto& [path, text] : files) write_text_file(path, text);
    }
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::uint64_t require_seed(const Options& o, const std::string& command) {
    if (!o.seed) throw UsageError(command + " is randomized and needs --seed");
    return *o.seed;
}

void print_summary(std::ostream& out, const Grid2D& g) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
    for (double v : g.cells()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    out << "side=" << g.side() << " min=" << format_number(lo) << " max=" << format_number(hi)
        << " mean=" << format_number(sum / double(g.size())) << "\n";
}

IntGrid to_int_grid(const Grid2D& g) {
    std::vector<std::int64_t> cells;
    cells.reserve(g.size());
    for (double v : g.cells()) {
        if (v != std::floor(v) || v > 9007199254740992.0)
            throw UsageError("the exact backend needs integer cell values, got " + format_number(v));
        cells.push_back(static_cast<std::int64_t>(v));
    }
    return IntGrid(g.side(), std::move(cells));
}

std::vector<ScalePair> scales_for(const Options& o, int side) {
    return o.scales.empty() ? default_scale_grid(side) : parse_scales(o.scales);
}

int single_n(const Options& o) {
    if (o.Ns.size() > 1) throw UsageError("this command takes a single --N");
    return o.Ns.empty() ? 16 : o.Ns.front();
}

// ---- compute ----

int cmd_compute(const Options& o, std::ostream& out) {
    const Grid2D g = read_grid_file(o.input);
    if (o.backend != "double" && o.backend != "exact") throw UsageError("--backend must be double or exact");
    const bool exact = o.backend == "exact";
    MaximalField field;
    if (o.op == "hl" || o.op == "strong") {
        if (o.dyadic && o.op != "hl") throw UsageError("--dyadic applies to --op hl only");
        if (exact) {
            const IntGrid ig = to_int_grid(g);
            const FractionGrid v = o.op == "hl" ? hl_maximal_values(ig, o.dyadic) : strong_maximal_values(ig);
            field.kind = o.op == "strong" ? OperatorKind::Strong : o.dyadic ? OperatorKind::HlDyadic : OperatorKind::HlAxis;
            field.meta = {{"operator", to_string(field.kind)}, {"backend", "exact"}};
            field.values = to_double(v);
        } else {
            field = o.op == "hl" ? hl_maximal(g, o.dyadic) : strong_maximal(g);
        }
    } else if (o.op == "W") {
        if (exact) throw UsageError("--op W runs on the double backend only");
        field = compose_W(g);
    } else if (o.op == "directional" || o.op == "W-directional") {
        if (exact) throw UsageError("directional operators run on the double backend only");
        const DirectionSet dirs(single_n(o));
        const auto scales = scales_for(o, g.side());
        field = o.op == "directional" ? directional_maximal(g, dirs, scales, o.refinement)
                                      : compose_W(g, dirs, scales, o.refinement);
    } else {
        throw UsageError("unknown --op '" + o.op + "' (hl, strong, directional, W, W-directional)");
    }
    Outputs files;
    files.add_grid(o.out, field.values, field.meta);
    files.flush();
    print_summary(out, field.values);
    return kExitOk;
}

// ---- make-weight ----

int cmd_make_weight(const Options& o, std::ostream& out) {
    const WeightSpec spec = parse_weight_spec(o.weight);
    const Grid2D w = make_weight(spec, o.grid);
    Outputs files;
    files.add_grid(o.out, w, {{"weight", spec.describe()}});
    files.flush();
    print_summary(out, w);
    return kExitOk;
}

// ---- covering ----

bool all_passed(const std::vector<CheckReport>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed; });
}

void report_checks(const std::vector<CheckReport>& checks, std::ostream& err) {
    for (const auto& c : checks)
        if (!c.passed) err << "check " << c.name << " failed at " << c.witness << ": " << c.detail << "\n";
}

int cmd_covering(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.check != "all" && o.check != "certificates" && o.check != "none")
        throw UsageError("--check must be all, certificates or none");
    if (o.family.empty() == (o.random_count == 0)) throw UsageError("give exactly one of --family and --random");
    const bool all = o.check == "all";
    const bool any = o.check != "none";
    Outputs files;
    std::vector<CheckReport> checks;
    std::string report;

    if (o.mode == "dyadic") {
        DyadicFamilyFile fam;
        if (!o.family.empty()) {
            fam = parse_dyadic_family(read_text_file(o.family));
        } else {
            Rng rng(require_seed(o, "covering --random"));
            fam.side = o.grid;
            fam.rects = random_dyadic_family(rng, o.grid, o.random_count);
        }
        if (!o.save_family.empty()) files.add(o.save_family, family_to_json(fam.rects, fam.side));
        const DyadicSelection sel = select_dyadic(fam.rects, fam.side);
        if (any) checks.push_back(check_dyadic_certificates(sel));
        if (all) {
            checks.push_back(check_covering_inclusion(sel));
            checks.push_back(multiplicity_bound_check(sel));
            checks.push_back(check_structural_fact(sel));
        }
        report = selection_to_json(sel, checks);
    } else if (o.mode == "directional") {
        DirectionalFamilyFile fam;
        if (!o.family.empty()) {
            fam = parse_directional_family(read_text_file(o.family));
        } else {
            Rng rng(require_seed(o, "covering --random"));
            fam.side = o.grid;
            fam.N = single_n(o);
            fam.rects = random_directional_family(rng, o.grid, fam.N, o.random_count);
        }
        if (!o.save_family.empty()) files.add(o.save_family, family_to_json(fam.rects, fam.side, fam.N));
        const DirectionalSelection sel = select_directional(fam.rects);
        if (any) checks.push_back(check_directional_certificates(sel));
        std::optional<DirectionalCoveringReport> cov;
        if (all) {
            cov = check_directional_covering(sel, fam.side, fam.N);
            CheckReport c{"covering-positive", cov->min_mq_y > 0.0, cov->cells_checked, {}, {}};
            if (!c.passed) {
                c.witness = "cell (" + std::to_string(cov->witness_x) + ", " + std::to_string(cov->witness_y) + ")";
                c.detail = "M_Q Y vanishes on a cell of an input rectangle";
            }
            checks.push_back(c);
        }
        report = selection_to_json(sel, checks, cov ? &*cov : nullptr);
    } else {
        throw UsageError("--mode must be dyadic or directional");
    }

    if (o.out.empty()) {
        out << report;
    } else {
        files.add(o.out, report);
    }
    files.flush();
    report_checks(checks, err);
    return all_passed(checks) ? kExitOk : kExitCheckFailed;
}

// ---- verify / sweep / search ----

int finish_failures(const std::vector<std::string>& failures, std::ostream& err) {
    for (const auto& f : failures) err << f << "\n";
    return failures.empty() ? kExitOk : kExitCheckFailed;
}

int cmd_suite(const Options& o, SuiteKind kind, std::ostream& out, std::ostream& err) {
    SuiteConfig c;
    c.kinds = {kind};
    c.side = o.grid;
    c.trials = o.trials.value_or(1000);
    c.seed = require_seed(o, "verify " + suite_name(kind));
    const bool takes_p = kind == SuiteKind::Cor13 || kind == SuiteKind::Cor15;
    const bool takes_n = kind == SuiteKind::Thm14 || kind == SuiteKind::Cor15;
    if (!o.ps.empty() && !takes_p) throw UsageError("--p does not apply to " + suite_name(kind));
    if (!o.Ns.empty() && !takes_n) throw UsageError("--N does not apply to " + suite_name(kind));
    c.ps = o.ps;
    c.Ns = o.Ns;
    if (c.trials < 1) throw UsageError("--trials must be positive");

    const SuiteResult r = run_suite(c);
    std::vector<std::string> failures = r.invariant_failures;
    if (!o.baseline.empty()) {
        const auto b = compare_baseline(r, read_text_file(o.baseline));
        failures.insert(failures.end(), b.begin(), b.end());
    }
    Outputs files;
    if (!o.jsonl.empty()) files.add(o.jsonl, reports_jsonl(r.reports, o.timestamp));
    if (!o.write_baseline.empty()) files.add(o.write_baseline, baseline_json(r));
    const std::string csv = summary_csv(r);
    if (o.csv.empty()) {
        out << csv;
    } else {
        files.add(o.csv, csv);
        for (const auto& g : r.groups) out << g.key << " worst_ratio=" << format_number(g.worst_ratio) << "\n";
    }
    files.flush();
    return finish_failures(failures, err);
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = require_seed(o, "sweep-n");
    const std::vector<int> Ns = o.Ns.empty() ? std::vector<int>{16, 32, 64, 128} : o.Ns;
    const int trials = o.trials.value_or(50);
    if (trials < 1) throw UsageError("--trials must be positive");
    const SweepResult s = sweep_directions(Ns, trials, seed, o.grid);
    std::vector<std::string> failures = s.invariant_failures;
    if (s.slope && *s.slope < 0) failures.push_back("negative slope " + format_number(*s.slope));
    if (!o.baseline.empty()) {
        const auto b = compare_sweep_baseline(s, read_text_file(o.baseline));
        failures.insert(failures.end(), b.begin(), b.end());
    }
    const std::string text = sweep_to_json(s);
    Outputs files;
    if (!o.write_baseline.empty()) files.add(o.write_baseline, text);
    if (o.out.empty()) {
        out << text;
    } else {
        files.add(o.out, text);
    }
    files.flush();
    return finish_failures(failures, err);
}

int cmd_search_p11(const Options& o, std::ostream& out) {
    const std::uint64_t seed = require_seed(o, "search-p11");
    if (o.form != "weak" && o.form != "strong") throw UsageError("--form must be weak or strong");
    const P11Form form = o.form == "weak" ? P11Form::Weak : P11Form::Strong;
    const P11SearchResult r = problem11_ratio_search(o.budget, seed, o.grid, form);
    const std::string best = report_to_json(r.best, o.timestamp);

    nlohmann::ordered_json j;
    j["kind"] = "search-p11";
    j["form"] = o.form;
    j["budget"] = o.budget;
    j["seed"] = seed;
    j["side"] = o.grid;
    j["evaluations"] = r.evaluations;
    j["best"] = nlohmann::ordered_json::parse(best);
    auto hist = nlohmann::ordered_json::array();
    for (double v : r.history) hist.push_back(std::isinf(v) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(round12(v)));
    j["history"] = hist;

    Outputs files;
    if (!o.out.empty()) files.add(o.out, j.dump(2) + "\n");
    if (!o.jsonl.empty()) files.add(o.jsonl, best + "\n");
    if (!o.f_out.empty()) files.add_grid(o.f_out, r.f, {{"role", "f"}});
    if (!o.w_out.empty()) files.add_grid(o.w_out, r.w, {{"role", "w"}});
    files.flush();
    out << best << "\n";
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.suite == "sweep-n") return cmd_sweep(o, out, err);
    if (o.suite == "p11") return cmd_search_p11(o, out);
    return cmd_suite(o, parse_suite(o.suite), out, err);
}

// ---- option wiring ----

void add_randomized(CLI::App* app, Options& o) {
    app->add_option("--seed", o.seed, "run seed (required)");
    app->add_option("--grid", o.grid, "grid side")->capture_default_str();
    app->add_option("--timestamp", o.timestamp, "timestamp written into reports")->capture_default_str();
}

void add_suite_options(CLI::App* app, Options& o) {
    add_randomized(app, o);
    app->add_option("--trials", o.trials, "zoo trials (1000 for suites, 50 for sweeps)");
    app->add_option("--p", o.ps, "exponents, comma separated")->delimiter(',');
    app->add_option("--N,--Ns", o.Ns, "direction counts, comma separated")->delimiter(',');
    app->add_option("--jsonl", o.jsonl, "JSON-lines report file");
    app->add_option("--csv", o.csv, "summary CSV file (default: stdout)");
    app->add_option("--out", o.out, "sweep or search JSON file (default: stdout)");
    app->add_option("--baseline", o.baseline, "fail if worst ratios exceed this baseline")->check(CLI::ExistingFile);
    app->add_option("--write-baseline", o.write_baseline, "record worst ratios to this file");
}

void add_search_options(CLI::App* app, Options& o) {
    app->add_option("--budget", o.budget, "evaluations")->capture_default_str();
    app->add_option("--form", o.form, "weak or strong")->capture_default_str();
    app->add_option("--f-out", o.f_out, "grid file for the best f");
    app->add_option("--w-out", o.w_out, "grid file for the best w");
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

} // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& config_text) {
    std::vector<std::string> merged = args;
    std::istringstream in(config_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
        if (has_flag(args, key)) continue;
        if (value == "true") {
            merged.push_back("--" + key);
        } else if (value != "false") {
            merged.push_back("--" + key + "=" + value);
        }
    }
    return merged;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Discrete maximal operators, covering selections and weighted inequality experiments.", "maxlab"};
    app.require_subcommand(1);

    auto* compute = app.add_subcommand("compute", "apply a maximal operator to a grid file");
    compute->add_option("--op", o.op, "hl, strong, directional, W (M_R M_Q) or W-directional (M_Sigma M_Q)")->required();
    compute->add_flag("--dyadic", o.dyadic, "dyadic squares for --op hl");
    compute->add_option("--input", o.input, "grid file (.csv or .json)")->required()->check(CLI::ExistingFile);
    compute->add_option("--out", o.out, "output grid file (.csv or .json)")->required();
    compute->add_option("--backend", o.backend, "double or exact")->capture_default_str();
    compute->add_option("--N", o.Ns, "number of directions")->expected(1);
    compute->add_option("--scales", o.scales, "L:l pairs, comma separated (default: full dyadic grid)");
    compute->add_option("--refinement", o.refinement, "translation lattice refinement")->capture_default_str();

    auto* covering = app.add_subcommand("covering", "run a covering selection and its checks");
    covering->add_option("--mode", o.mode, "dyadic or directional")->required();
    covering->add_option("--family", o.family, "family JSON file")->check(CLI::ExistingFile);
    covering->add_option("--random", o.random_count, "draw a random family of this many rectangles");
    covering->add_option("--check", o.check, "all, certificates or none")->capture_default_str();
    covering->add_option("--N", o.Ns, "number of directions for a random directional family")->expected(1);
    covering->add_option("--out", o.out, "report JSON file (default: stdout)");
    covering->add_option("--save-family", o.save_family, "write the family as JSON");
    covering->add_option("--seed", o.seed, "seed for --random");
    covering->add_option("--grid", o.grid, "grid side for --random")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run an inequality suite");
    verify->add_option("suite", o.suite, "fs, thm12, cor13, thm14, cor15, sweep-n or p11")->required();
    add_suite_options(verify, o);
    add_search_options(verify, o);

    auto* sweep = app.add_subcommand("sweep-n", "worst Thm1.4 ratio against log N");
    add_suite_options(sweep, o);

    auto* search = app.add_subcommand("search-p11", "search for large ratios with M_R w in place of W");
    add_randomized(search, o);
    add_search_options(search, o);
    search->add_option("--out", o.out, "result JSON file");
    search->add_option("--jsonl", o.jsonl, "best report as one JSON line");

    auto* weight = app.add_subcommand("make-weight", "write a weight grid");
    weight->add_option("--weight", o.weight, "weight spec, e.g. lognormal:seed=42,sigma=1.5")->required();
    weight->add_option("--grid", o.grid, "grid side")->capture_default_str();
    weight->add_option("--out", o.out, "output grid file")->required();

    try {
        std::vector<std::string> args;
        std::optional<std::string> config;
        for (std::size_t i = 0; i < raw_args.size(); ++i) {
            const std::string& a = raw_args[i];
            if (a == "--config") {
                if (i + 1 >= raw_args.size()) throw UsageError("--config needs a file");
                config = raw_args[++i];
            } else if (a.rfind("--config=", 0) == 0) {
                config = a.substr(9);
            } else {
                args.push_back(a);
            }
        }
        if (config) args = merge_config(args, read_text_file(*config));

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            err << "maxlab: " << e.what() << "\n";
            return kExitUsage;
        }

        if (compute->parsed()) return cmd_compute(o, out);
        if (covering->parsed()) return cmd_covering(o, out, err);
        if (verify->parsed()) return cmd_verify(o, out, err);
        if (sweep->parsed()) return cmd_sweep(o, out, err);
        if (search->parsed()) return cmd_search_p11(o, out);
        if (weight->parsed()) return cmd_make_weight(o, out);
        return kExitUsage;
    } catch (const Error& e) {
        err << "maxlab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "maxlab: malformed JSON: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace maxlab::cli
