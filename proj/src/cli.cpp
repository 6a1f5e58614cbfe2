#include "intorder/cli.hpp"

#include "intorder/dgp.hpp"
#include "intorder/errors.hpp"
#include "intorder/io.hpp"
#include "intorder/limit_dist.hpp"
#include "intorder/lrcov.hpp"
#include "intorder/mcharness.hpp"
#include "intorder/vtests.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace intorder::cli {

namespace fs = std::filesystem;

namespace {

struct LimitOptions {
    std::string cache_dir;
    bool no_cache = false;
    std::size_t reps = kDefaultLimitReps;
    std::size_t steps = kDefaultLimitSteps;
    std::uint64_t seed = kDefaultLimitSeed;
    unsigned threads = 0;
};

struct PanelOptions {
    std::string path;
    std::string transform = "identity";
    bool no_initialize = false;
    bool header = false;
    std::string delimiter = ",";
};

struct TestOptions {
    PanelOptions panel;
    LimitOptions limit;
    int order = 0;
    bool demeaned = false;
    double alpha = 0.025;
    std::string q = "auto";
    bool json = false;
    std::string output;
    // classify only
    bool reversed = false;
    int max_order = 1;
};

struct SimulateOptions {
    double d1 = 0.0;
    std::optional<double> local_c;
    long T = 250;
    std::size_t G = 101;
    double b = 0.15;
    bool intercept = false;
    int cap = 25;
    std::string q_rule = "t20";
    std::uint64_t seed = 1;
    std::string out;
    std::string sidecar;
};

struct CritvalOptions {
    LimitOptions limit;
    std::string kind = "both";
    bool json = false;
};

struct ExperimentOptions {
    std::string name;
    LimitOptions limit;
    std::size_t reps = 0;
    std::uint64_t seed = 1;
    std::string out_dir;
    bool list = false;
};

void add_limit_flags(CLI::App* cmd, LimitOptions& o)
{
    cmd->add_option("--critval-cache", o.cache_dir, "Critical-value cache directory (default $INTORDER_CACHE_DIR or ./.intorder-cache)");
    cmd->add_flag("--no-cache", o.no_cache, "Simulate critical values without reading or writing the cache");
    cmd->add_option("--reps", o.reps, "Replications of the simulated null distribution")->check(CLI::Range(1000ul, 100000000ul));
    cmd->add_option("--steps", o.steps, "Random-walk steps per replication")->check(CLI::Range(100ul, 10000000ul));
    cmd->add_option("--seed", o.seed, "Seed of the null-distribution simulation");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_panel_flags(CLI::App* cmd, PanelOptions& o)
{
    cmd->add_option("input", o.path, "CSV panel: one curve per row, one grid point per column")->required();
    cmd->add_option("--transform", o.transform, "identity, logit, log or probit")
        ->check(CLI::IsMember({"identity", "logit", "log", "probit"}));
    cmd->add_flag("--no-initialize", o.no_initialize, "Do not subtract the first curve from every row");
    cmd->add_flag("--header", o.header, "Skip the first line of the CSV");
    cmd->add_option("--delimiter", o.delimiter, "Field delimiter (one character)");
}

LimitDistribution obtain_limit(const LimitOptions& o, LimitKind kind)
{
    if (o.no_cache) {
        return simulate_limit(kind, o.reps, o.steps, o.seed, o.threads);
    }
    const fs::path dir = o.cache_dir.empty() ? default_cache_dir() : fs::path(o.cache_dir);
    return load_or_simulate(dir, kind, o.reps, o.steps, o.seed, o.threads);
}

FunctionalPanel load_panel(const PanelOptions& o)
{
    if (!fs::exists(o.path)) {
        throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory), o.path);
    }
    if (o.delimiter.size() != 1) {
        throw CLI::ValidationError("--delimiter", "must be a single character");
    }
    IngestConfig cfg;
    cfg.path = o.path;
    cfg.transform = *parse_transform(o.transform);
    cfg.initialize = !o.no_initialize;
    cfg.has_header = o.header;
    cfg.delimiter = o.delimiter[0];
    return ingest(cfg);
}

// "auto" (= t20), a bandwidth rule name, or a non-negative integer.
int resolve_q(const std::string& spec, long n_rows)
{
    if (auto rule = parse_bandwidth_rule(spec)) {
        return bandwidth(*rule, n_rows);
    }
    int q = -1;
    const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), q);
    if (ec != std::errc() || ptr != spec.data() + spec.size() || q < 0) {
        throw CLI::ValidationError("--q", "expected auto, t20, t25, log40 or a non-negative integer, got '" + spec + "'");
    }
    return q;
}

std::string fmt(double v, const char* f = "%.4f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string fmt_p(const TestReport& r)
{
    const double floor = r.limit_reps > 0 ? 1.0 / static_cast<double>(r.limit_reps) : 0.0;
    if (r.p_value < floor) {
        return "< " + fmt(floor, "%.0e");
    }
    return fmt(r.p_value, r.p_value < 1e-3 ? "%.1e" : "%.4f");
}

void print_stage_table(std::ostream& out, const std::vector<TestReport>& stages)
{
    out << "test   statistic   p-value     q   quantiles (lower, upper)   decision\n";
    for (const TestReport& r : stages) {
        std::string name = (r.demeaned ? "~V" : " V") + std::to_string(r.order);
        char line[256];
        std::snprintf(line, sizeof line, "%-5s %10.4f   %-9s %3d   (%.4f, %.4f)%9s", name.c_str(), r.statistic,
                      fmt_p(r).c_str(), r.q, r.lower_quantile, r.upper_quantile, "");
        out << line << "   " << describe(r.decision) << '\n';
    }
}

void emit_json(std::ostream& out, const nlohmann::json& j, const std::string& path)
{
    if (!path.empty()) {
        std::ofstream f(path);
        if (!f) {
            throw IoError("cannot write " + path);
        }
        f << j.dump(2) << '\n';
        if (!f) {
            throw IoError("failed writing " + path);
        }
    } else {
        out << j.dump(2) << '\n';
    }
}

CriticalValues* build_cv(const LimitOptions& o, bool need_bridge, std::optional<LimitDistribution>& motion,
                         std::optional<LimitDistribution>& bridge, std::optional<CriticalValues>& cv)
{
    motion.emplace(obtain_limit(o, LimitKind::BrownianMotion));
    if (need_bridge) {
        bridge.emplace(obtain_limit(o, LimitKind::BrownianBridge));
        cv.emplace(*motion, *bridge);
    } else {
        cv.emplace(*motion);
    }
    return &*cv;
}

int cmd_test(const TestOptions& o, std::ostream& out)
{
    if (o.order < 0 || o.order > 2) {
        throw CLI::ValidationError("--order", "must be 0, 1 or 2");
    }
    if (!(o.alpha > 0.0 && o.alpha < 0.5)) {
        throw CLI::ValidationError("--alpha", "must lie in (0, 0.5)");
    }
    const FunctionalPanel panel = load_panel(o.panel);
    const int q = resolve_q(o.q, static_cast<long>(panel.n_rows()));
    const VarianceRatioTest test(panel, o.demeaned);

    std::optional<LimitDistribution> motion, bridge;
    std::optional<CriticalValues> cv;
    build_cv(o.limit, o.demeaned && o.order == 0, motion, bridge, cv);
    const TestReport report = run_test(test, o.order, q, o.alpha, *cv);

    nlohmann::json j = to_json(report);
    j["input"] = o.panel.path;
    j["transform"] = o.panel.transform;
    j["initialized"] = !o.panel.no_initialize;
    if (o.json) {
        emit_json(out, j, "");
    } else {
        out << "input: " << o.panel.path << "  (" << panel.n_rows() << " curves x " << panel.grid_size()
            << " grid points, transform " << o.panel.transform << ")\n";
        print_stage_table(out, {report});
        out << "per-tail alpha " << o.alpha << ", null limit " << to_string(report.limit) << " ("
            << report.limit_reps << " replications)\n";
        if (report.degenerate_direction) {
            out << "warning: dominant eigenvalue is not separated; direction may be unstable\n";
        }
        if (!o.output.empty()) {
            emit_json(out, j, o.output);
        }
    }
    switch (report.decision) {
    case Decision::Accept:
        return kExitAccept;
    case Decision::RejectLower:
        return kExitRejectLower;
    case Decision::RejectUpper:
        return kExitRejectUpper;
    }
    return kExitInternal;
}

int cmd_classify(const TestOptions& o, std::ostream& out)
{
    if (!(o.alpha > 0.0 && o.alpha < 0.5)) {
        throw CLI::ValidationError("--alpha", "must lie in (0, 0.5)");
    }
    const FunctionalPanel panel = load_panel(o.panel);
    SequentialOptions opts;
    opts.alpha = o.alpha;
    opts.q = resolve_q(o.q, static_cast<long>(panel.n_rows()));
    opts.demeaned = o.demeaned;
    opts.max_order = o.max_order;
    opts.reversed = o.reversed;

    std::optional<LimitDistribution> motion, bridge;
    std::optional<CriticalValues> cv;
    build_cv(o.limit, o.demeaned, motion, bridge, cv);
    const SequentialReport report = sequential(panel, opts, *cv);

    nlohmann::json j = to_json(report);
    j["input"] = o.panel.path;
    j["transform"] = o.panel.transform;
    j["initialized"] = !o.panel.no_initialize;
    if (o.json) {
        emit_json(out, j, "");
    } else {
        out << "input: " << o.panel.path << "  (" << panel.n_rows() << " curves x " << panel.grid_size()
            << " grid points, transform " << o.panel.transform << ")\n";
        print_stage_table(out, report.stages);
        out << "memory range: d in " << to_string(report.interval) << "   d_seq = " << report.d_seq
            << (report.reversed ? "   (reversed order)" : "") << '\n';
        if (!o.output.empty()) {
            emit_json(out, j, o.output);
        }
    }
    return report.d_seq == 1 ? kExitAccept : kExitFractional;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out)
{
    DgpConfig cfg;
    cfg.T = o.T;
    cfg.G = o.G;
    cfg.b = o.b;
    cfg.with_intercept = o.intercept;
    cfg.coordinate_cap = o.cap;
    cfg.seed = o.seed;
    const auto rule = parse_bandwidth_rule(o.q_rule);
    if (!rule) {
        throw CLI::ValidationError("--q-rule", "expected t20, t25 or log40");
    }
    cfg.q_rule = *rule;
    if (o.local_c) {
        cfg.regime = Regime::LocalToZero;
        cfg.local_c = *o.local_c;
    } else {
        cfg.d1 = o.d1;
        cfg.regime = regime_for(o.d1);
    }
    const DgpRealization real = generate(cfg);
    if (o.out.empty() || o.out == "-") {
        write_panel_csv(out, real.panel);
        if (!o.sidecar.empty()) {
            emit_json(out, to_json(real), o.sidecar);
        }
    } else {
        write_panel_csv(fs::path(o.out), real.panel);
        emit_json(out, to_json(real), o.sidecar.empty() ? o.out + ".json" : o.sidecar);
    }
    return kExitAccept;
}

int cmd_critval(const CritvalOptions& o, std::ostream& out)
{
    std::vector<LimitKind> kinds;
    if (o.kind == "both") {
        kinds = {LimitKind::BrownianMotion, LimitKind::BrownianBridge};
    } else {
        kinds = {*parse_limit_kind(o.kind)};
    }
    const std::array<double, 6> probs{0.01, 0.025, 0.05, 0.95, 0.975, 0.99};
    nlohmann::json all = nlohmann::json::array();
    for (LimitKind kind : kinds) {
        const LimitDistribution dist = obtain_limit(o.limit, kind);
        nlohmann::json q = nlohmann::json::object();
        for (double p : probs) {
            q[fmt(p, "%g")] = dist.quantile(p);
        }
        all.push_back({{"kind", to_string(kind)},
                       {"reps", dist.n_reps()},
                       {"steps", dist.n_steps()},
                       {"seed", dist.seed()},
                       {"mean", dist.mean()},
                       {"quantiles", std::move(q)}});
        if (!o.json) {
            out << to_string(kind) << ": reps " << dist.n_reps() << ", steps " << dist.n_steps() << ", seed "
                << dist.seed() << ", mean " << fmt(dist.mean()) << '\n';
            for (double p : probs) {
                out << "  " << fmt(p, "%5.3f") << "  " << fmt(dist.quantile(p)) << '\n';
            }
            if (!o.limit.no_cache) {
                const fs::path dir = o.limit.cache_dir.empty() ? default_cache_dir() : fs::path(o.limit.cache_dir);
                out << "  cache " << (dir / cache_file_name(kind, dist.n_reps(), dist.n_steps(), dist.seed())).string()
                    << '\n';
            }
        }
    }
    if (o.json) {
        emit_json(out, {{"schema", "intorder.critval/1"}, {"distributions", std::move(all)}}, "");
    }
    return kExitAccept;
}

int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err)
{
    if (o.list) {
        for (const std::string& n : preset_names()) {
            out << n << '\n';
        }
        return kExitAccept;
    }
    if (o.name.empty()) {
        throw CLI::ValidationError("preset", "a preset name is required (see --list)");
    }
    std::vector<ExperimentSpec> specs = preset(o.name);
    std::optional<LimitDistribution> motion, bridge;
    std::optional<CriticalValues> cv;
    const bool need_bridge =
        std::any_of(specs.begin(), specs.end(), [](const ExperimentSpec& s) { return s.kind == CellKind::Demeaned; });
    build_cv(o.limit, need_bridge, motion, bridge, cv);

    if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
    }
    for (ExperimentSpec& spec : specs) {
        if (o.reps > 0) {
            spec.n_reps = o.reps;
        }
        spec.base_seed = o.seed;
        const ExperimentResult result = run_experiment(spec, *cv, o.limit.threads);
        for (const CellResult& c : result.cells) {
            if (c.invalid) {
                err << "warning: cell " << c.cell.key() << " lost " << c.n_failed << " of " << spec.n_reps
                    << " replications\n";
            }
        }
        out << "# " << spec.table_id << " (" << spec.n_reps << " replications per cell)\n";
        write_table_csv(out, result);
        if (!o.out_dir.empty()) {
            const fs::path base = fs::path(o.out_dir) / spec.table_id;
            std::ofstream csv(base.string() + ".csv");
            write_table_csv(csv, result);
            std::ofstream dat(base.string() + ".dat");
            write_plot_data(dat, result);
            if (!csv || !dat) {
                throw IoError("failed writing results under " + o.out_dir);
            }
            emit_json(out, to_json(result), base.string() + ".json");
        }
    }
    return kExitAccept;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Integer versus fractional integration order tests for functional time series", "intorder"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "intorder 1.0.0");

    TestOptions test_opts;
    CLI::App* test = app.add_subcommand("test", "Run one variance-ratio test on a CSV panel");
    add_panel_flags(test, test_opts.panel);
    add_limit_flags(test, test_opts.limit);
    test->add_option("--order", test_opts.order, "Integer order under the null: 0, 1 or 2");
    test->add_flag("--demeaned", test_opts.demeaned, "Use the demeaned statistic");
    test->add_option("--alpha", test_opts.alpha, "Per-tail significance level");
    test->add_option("--q", test_opts.q, "Bartlett bandwidth: auto, t20, t25, log40 or an integer");
    test->add_flag("--json", test_opts.json, "Print the JSON report instead of the table");
    test->add_option("--output", test_opts.output, "Also write the JSON report to this file");

    TestOptions cls_opts;
    CLI::App* classify = app.add_subcommand("classify", "Sequential classification of the memory order");
    add_panel_flags(classify, cls_opts.panel);
    add_limit_flags(classify, cls_opts.limit);
    classify->add_flag("--demeaned", cls_opts.demeaned, "Use the demeaned statistics");
    classify->add_option("--alpha", cls_opts.alpha, "Per-tail significance level of every stage");
    classify->add_option("--q", cls_opts.q, "Bartlett bandwidth: auto, t20, t25, log40 or an integer");
    classify->add_flag("--reversed", cls_opts.reversed, "Start from the order-1 test and step down");
    classify->add_option("--max-order", cls_opts.max_order, "Highest integer order tested (1 or 2)")
        ->check(CLI::Range(1, 2));
    classify->add_flag("--json", cls_opts.json, "Print the JSON report instead of the table");
    classify->add_option("--output", cls_opts.output, "Also write the JSON report to this file");

    SimulateOptions sim_opts;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a panel from the simulation design");
    simulate->add_option("--d1", sim_opts.d1, "Leading memory parameter");
    simulate->add_option("--local-c", sim_opts.local_c, "Local-to-zero design with d1 = c / log(T/q)");
    simulate->add_option("--T", sim_opts.T, "Number of curves");
    simulate->add_option("--G", sim_opts.G, "Grid points per curve");
    simulate->add_option("--b", sim_opts.b, "ARMA coefficients are drawn from U[-b, b]");
    simulate->add_flag("--intercept", sim_opts.intercept, "Add a random mean curve");
    simulate->add_option("--coordinates", sim_opts.cap, "Number of basis coordinates");
    simulate->add_option("--q-rule", sim_opts.q_rule, "Bandwidth rule used by --local-c");
    simulate->add_option("--seed", sim_opts.seed, "Random seed");
    simulate->add_option("--out", sim_opts.out, "CSV output file (default stdout)");
    simulate->add_option("--sidecar", sim_opts.sidecar, "JSON parameter file (default <out>.json)");

    CritvalOptions cv_opts;
    CLI::App* critval = app.add_subcommand("critval", "Build or inspect simulated critical values");
    add_limit_flags(critval, cv_opts.limit);
    critval->add_option("--kind", cv_opts.kind, "bm, bridge or both")->check(CLI::IsMember({"bm", "bridge", "both"}));
    critval->add_flag("--json", cv_opts.json, "Print JSON instead of the table");

    ExperimentOptions exp_opts;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment preset");
    experiment->add_option("preset", exp_opts.name, "Preset name, e.g. t1a or t1a-desk");
    add_limit_flags(experiment, exp_opts.limit);
    experiment->remove_option(experiment->get_option("--seed"));
    experiment->add_option("--critval-seed", exp_opts.limit.seed, "Seed of the null-distribution simulation");
    experiment->add_option("--mc-reps", exp_opts.reps, "Override the replications per cell");
    experiment->add_option("--seed", exp_opts.seed, "Base seed of the experiment");
    experiment->add_option("--out-dir", exp_opts.out_dir, "Write <table>.csv, .json and .dat here");
    experiment->add_flag("--list", exp_opts.list, "List the available presets");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (test->parsed()) {
            return cmd_test(test_opts, out);
        }
        if (classify->parsed()) {
            return cmd_classify(cls_opts, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_opts, out);
        }
        if (critval->parsed()) {
            return cmd_critval(cv_opts, out);
        }
        if (experiment->parsed()) {
            return cmd_experiment(exp_opts, out, err);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::system_error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == std::errc::no_such_file_or_directory ? kExitNoInput : kExitIo;
    } catch (const DegenerateVarianceError& e) {
        err << "error: degenerate variance: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

}  // namespace intorder::cli
