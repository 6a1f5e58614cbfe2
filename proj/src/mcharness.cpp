#include "intorder/mcharness.hpp"

#include "intorder/errors.hpp"
#include "intorder/parallel.hpp"
#include "intorder/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace intorder {

namespace {

constexpr std::array<long, 5> kFullSampleSizes{125, 250, 500, 750, 1000};
constexpr std::array<long, 3> kDeskSampleSizes{125, 250, 500};
constexpr std::array<double, 7> kStationaryD1{-0.45, -0.3, -0.15, 0.0, 0.15, 0.3, 0.45};
constexpr std::array<double, 7> kNonstationaryD1{0.55, 0.7, 0.85, 1.0, 1.15, 1.3, 1.45};
constexpr std::array<double, 7> kLocalC{-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};

// d1 ranges of the fractional sequential table, each drawn with probability 1/4.
struct FractionalRange {
    double lo;
    double hi;
    Interval truth;
    int group;
};
constexpr std::array<FractionalRange, 4> kFractionalRanges{{
    {-0.485, -0.15, Interval::AntiPersistent, 0},
    {0.15, 0.5, Interval::ZeroOne, 1},
    {0.5, 0.85, Interval::ZeroOne, 1},
    {1.15, 1.5, Interval::OneTwo, 2},
}};

const std::array<std::string, 3> kFractionalGroups{"d1<0", "d1 in (0,1)", "d1>1"};
const std::array<std::string, 2> kIntegerGroups{"d1=0", "d1=1"};

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_rate(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double std_error(double rate, std::size_t n)
{
    return n > 0 ? std::sqrt(rate * (1.0 - rate) / static_cast<double>(n)) : 0.0;
}

bool is_sequential(CellKind kind)
{
    return kind == CellKind::SequentialInteger || kind == CellKind::SequentialFractional;
}

DgpConfig base_config(const ExperimentSpec& spec, const Cell& cell, std::uint64_t seed)
{
    DgpConfig cfg;
    cfg.T = cell.T;
    cfg.G = spec.grid_size;
    cfg.b = cell.b;
    cfg.q_rule = cell.q_rule;
    cfg.seed = seed;
    return cfg;
}

Decision single_test(const FunctionalPanel& panel, int order, bool demeaned, int q, double alpha,
                     const CriticalValues& cv, double& statistic)
{
    const VStatistic stat = v_statistic(panel, order, demeaned, q);
    statistic = stat.statistic;
    return decide(stat.statistic, cv.get(limit_kind_for(order, demeaned)), alpha);
}

bool correct_rejection(Decision decision, double d1, double null_value)
{
    if (std::abs(d1 - null_value) < 1e-12) {
        return decision != Decision::Accept;
    }
    return d1 < null_value ? decision == Decision::RejectLower : decision == Decision::RejectUpper;
}

CellResult run_cell(const ExperimentSpec& spec, const Cell& cell, const CriticalValues& cv, unsigned threads)
{
    const auto start = std::chrono::steady_clock::now();
    std::vector<Replication> reps(spec.n_reps);
    parallel_for(
        spec.n_reps, threads, [&](std::size_t r) { reps[r] = run_replication(spec, cell, r, cv); }, 4);

    CellResult out;
    out.cell = cell;
    std::size_t hits = 0;
    const std::size_t n_groups = spec.kind == CellKind::SequentialInteger      ? kIntegerGroups.size()
                                 : spec.kind == CellKind::SequentialFractional ? kFractionalGroups.size()
                                                                               : 0;
    std::vector<std::size_t> group_n(n_groups, 0);
    std::vector<std::size_t> group_hits(n_groups, 0);
    for (const Replication& r : reps) {
        if (!r.ok) {
            ++out.n_failed;
            continue;
        }
        ++out.n_valid;
        if (spec.kind == CellKind::SequentialInteger) {
            // Headline rate: an integer order was concluded; breakdown: the right one.
            hits += r.statistic > 0.5 ? 1 : 0;
        } else {
            hits += r.hit ? 1 : 0;
        }
        if (r.group >= 0) {
            ++group_n[static_cast<std::size_t>(r.group)];
            group_hits[static_cast<std::size_t>(r.group)] += r.hit ? 1 : 0;
        }
    }
    out.rate = out.n_valid > 0 ? static_cast<double>(hits) / static_cast<double>(out.n_valid) : 0.0;
    out.std_error = std_error(out.rate, out.n_valid);
    out.invalid = static_cast<double>(out.n_failed) > 0.01 * static_cast<double>(spec.n_reps);
    for (std::size_t g = 0; g < n_groups; ++g) {
        const double rate =
            group_n[g] > 0 ? static_cast<double>(group_hits[g]) / static_cast<double>(group_n[g]) : 0.0;
        const std::string& label =
            spec.kind == CellKind::SequentialInteger ? kIntegerGroups[g] : kFractionalGroups[g];
        out.breakdown.push_back(SubRate{label, rate, group_n[g], std_error(rate, group_n[g])});
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ExperimentResult run_cells(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    validate(spec);
    ExperimentResult result{spec, {}};
    result.cells.reserve(spec.cells.size());
    for (const Cell& cell : spec.cells) {
        result.cells.push_back(run_cell(spec, cell, cv, threads));
    }
    return result;
}

ExperimentResult run_checked(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads,
                             std::initializer_list<CellKind> allowed, const char* who)
{
    for (CellKind k : allowed) {
        if (spec.kind == k) {
            return run_cells(spec, cv, threads);
        }
    }
    throw ContractViolation(std::string(who) + ": experiment kind " + std::string(to_string(spec.kind)) +
                            " not handled here");
}

std::vector<Cell> grid_cells(std::span<const long> sizes, std::initializer_list<double> bs, std::span<const double> xs,
                             std::initializer_list<BandwidthRule> rules)
{
    std::vector<Cell> cells;
    for (BandwidthRule rule : rules) {
        for (double b : bs) {
            for (long T : sizes) {
                for (double x : xs) {
                    cells.push_back(Cell{T, b, x, rule});
                }
            }
        }
    }
    return cells;
}

}  // namespace

std::string_view to_string(CellKind kind)
{
    switch (kind) {
    case CellKind::SizePower:
        return "size_power";
    case CellKind::Demeaned:
        return "demeaned";
    case CellKind::LocalAlternative:
        return "local_alternative";
    case CellKind::SequentialInteger:
        return "sequential_integer";
    case CellKind::SequentialFractional:
        return "sequential_fractional";
    }
    return "?";
}

std::string Cell::key() const
{
    return "T=" + std::to_string(T) + ";b=" + format_number(b) + ";x=" + format_number(x) +
           ";q=" + std::string(to_string(q_rule));
}

void validate(const ExperimentSpec& spec)
{
    if (spec.n_reps < 100) {
        throw DomainError("experiment needs at least 100 replications per cell");
    }
    if (spec.cells.empty()) {
        throw DomainError("experiment has no cells");
    }
    if (!(spec.alpha > 0.0 && spec.alpha < 0.5)) {
        throw DomainError("experiment alpha must lie in (0, 0.5)");
    }
    if (spec.kind == CellKind::SizePower && spec.order != 0 && spec.order != 1) {
        throw DomainError("size/power experiments test order 0 or 1");
    }
}

std::uint64_t replication_seed(const ExperimentSpec& spec, const Cell& cell, std::size_t rep)
{
    return derive_seed(spec.base_seed, {hash_label(spec.table_id), hash_label(to_string(spec.kind)),
                                        static_cast<std::uint64_t>(spec.order), hash_label(cell.key()), rep});
}

Replication run_replication(const ExperimentSpec& spec, const Cell& cell, std::size_t rep, const CriticalValues& cv)
{
    const std::uint64_t seed = replication_seed(spec, cell, rep);
    const int q = bandwidth(cell.q_rule, cell.T);
    Replication out;
    try {
        switch (spec.kind) {
        case CellKind::SizePower: {
            DgpConfig cfg = base_config(spec, cell, seed);
            cfg.d1 = cell.x;
            cfg.regime = regime_for(cell.x);
            const DgpRealization real = generate(cfg);
            const Decision d = single_test(real.panel, spec.order, false, q, spec.alpha, cv, out.statistic);
            out.hit = correct_rejection(d, cell.x, static_cast<double>(spec.order));
            break;
        }
        case CellKind::Demeaned: {
            DgpConfig cfg = base_config(spec, cell, seed);
            cfg.d1 = cell.x;
            cfg.regime = regime_for(cell.x);
            cfg.with_intercept = true;
            const DgpRealization real = generate(cfg);
            const Decision d = single_test(real.panel, 0, true, q, spec.alpha, cv, out.statistic);
            out.hit = correct_rejection(d, cell.x, 0.0);
            break;
        }
        case CellKind::LocalAlternative: {
            DgpConfig cfg = base_config(spec, cell, seed);
            cfg.regime = Regime::LocalToZero;
            cfg.local_c = cell.x;
            const DgpRealization real = generate(cfg);
            const Decision d = single_test(real.panel, 0, false, q, spec.alpha, cv, out.statistic);
            out.hit = d != Decision::Accept;
            break;
        }
        case CellKind::SequentialInteger:
        case CellKind::SequentialFractional: {
            RandomStream pick(seed, {0x7069636b});  // "pick"
            double d1 = 0.0;
            Interval truth = Interval::Zero;
            if (spec.kind == CellKind::SequentialInteger) {
                const int which = pick.uniform_int(0, 1);
                d1 = static_cast<double>(which);
                truth = which == 0 ? Interval::Zero : Interval::One;
                out.group = which;
            } else {
                const FractionalRange& range = kFractionalRanges[static_cast<std::size_t>(pick.uniform_int(0, 3))];
                d1 = pick.uniform(range.lo, range.hi);
                truth = range.truth;
                out.group = range.group;
            }
            DgpConfig cfg = base_config(spec, cell, derive_seed(seed, {1}));
            cfg.d1 = d1;
            cfg.regime = regime_for(d1);
            const DgpRealization real = generate(cfg);
            SequentialOptions opts;
            opts.alpha = spec.alpha;
            opts.q = q;
            opts.max_order = 1;
            const SequentialReport rep_report = sequential(real.panel, opts, cv);
            out.hit = rep_report.interval == truth;
            // statistic carries d_seq for the integer table's headline rate.
            out.statistic = rep_report.d_seq;
            break;
        }
        }
        out.ok = true;
    } catch (const DegenerateVarianceError&) {
        out.ok = false;
    } catch (const NumericError&) {
        out.ok = false;
    }
    return out;
}

ExperimentResult run_size_power(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    return run_checked(spec, cv, threads, {CellKind::SizePower}, "run_size_power");
}

ExperimentResult run_demeaned_table(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    return run_checked(spec, cv, threads, {CellKind::Demeaned}, "run_demeaned_table");
}

ExperimentResult run_local_alternatives(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    return run_checked(spec, cv, threads, {CellKind::LocalAlternative}, "run_local_alternatives");
}

ExperimentResult run_sequential_table(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    return run_checked(spec, cv, threads, {CellKind::SequentialInteger, CellKind::SequentialFractional},
                       "run_sequential_table");
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads)
{
    return run_cells(spec, cv, threads);
}

std::vector<ExperimentSpec> preset(std::string_view name)
{
    std::string base(name);
    bool desk = false;
    if (base.size() > 5 && base.ends_with("-desk")) {
        desk = true;
        base.resize(base.size() - 5);
    }
    const std::span<const long> sizes = desk ? std::span<const long>(kDeskSampleSizes) : std::span<const long>(kFullSampleSizes);

    auto make = [&](std::string id, CellKind kind, int order, std::vector<Cell> cells) {
        ExperimentSpec s;
        s.table_id = std::move(id);
        s.kind = kind;
        s.order = order;
        s.cells = std::move(cells);
        s.n_reps = desk ? 500 : 2000;
        return s;
    };
    const auto fifth = BandwidthRule::PowerFifth;
    const auto quarter = BandwidthRule::PowerQuarter;
    const auto logq = BandwidthRule::LogScaled;
    const std::array<double, 1> unused{0.0};

    if (base == "t1a") {
        return {make("T1a", CellKind::SizePower, 0, grid_cells(sizes, {0.15, 0.6}, kStationaryD1, {fifth}))};
    }
    if (base == "t1b") {
        return {make("T1b", CellKind::SizePower, 1, grid_cells(sizes, {0.15, 0.6}, kNonstationaryD1, {fifth}))};
    }
    if (base == "t2a") {
        return {make("T2a", CellKind::SequentialInteger, 0, grid_cells(sizes, {0.15, 0.6}, unused, {fifth}))};
    }
    if (base == "t2b") {
        return {make("T2b", CellKind::SequentialFractional, 0, grid_cells(sizes, {0.15, 0.6}, unused, {fifth}))};
    }
    if (base == "t2") {
        auto a = preset(desk ? "t2a-desk" : "t2a");
        auto b = preset(desk ? "t2b-desk" : "t2b");
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    if (base == "t3") {
        return {make("T3", CellKind::Demeaned, 0, grid_cells(sizes, {0.15, 0.6}, kStationaryD1, {fifth}))};
    }
    if (base == "s4") {
        return {make("S4", CellKind::SizePower, 0, grid_cells(sizes, {0.15, 0.6}, kStationaryD1, {logq}))};
    }
    if (base == "s5") {
        return {make("S5", CellKind::SizePower, 0, grid_cells(sizes, {0.15, 0.6}, kStationaryD1, {quarter}))};
    }
    if (base == "s6") {
        return {make("S6", CellKind::SizePower, 0, grid_cells(sizes, {0.75}, kStationaryD1, {logq, fifth, quarter}))};
    }
    if (base == "s7") {
        return {make("S7", CellKind::LocalAlternative, 0, grid_cells(sizes, {0.15, 0.6}, kLocalC, {logq}))};
    }
    if (base == "s8") {
        return {make("S8", CellKind::LocalAlternative, 0, grid_cells(sizes, {0.15, 0.6}, kLocalC, {fifth}))};
    }
    if (base == "s9") {
        return {make("S9", CellKind::LocalAlternative, 0, grid_cells(sizes, {0.15, 0.6}, kLocalC, {quarter}))};
    }
    throw DomainError("unknown experiment preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names{"t1a", "t1b", "t2", "t2a", "t2b", "t3", "s4", "s5", "s6", "s7", "s8", "s9"};
    const std::size_t n = names.size();
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(names[i] + "-desk");
    }
    return names;
}

void write_table_csv(std::ostream& out, const ExperimentResult& result)
{
    const ExperimentSpec& spec = result.spec;
    if (is_sequential(spec.kind)) {
        std::set<long> sizes;
        for (const CellResult& c : result.cells) {
            sizes.insert(c.cell.T);
        }
        out << "b,case";
        for (long T : sizes) {
            out << ",T=" << T;
        }
        out << '\n';
        std::set<double> bs;
        for (const CellResult& c : result.cells) {
            bs.insert(c.cell.b);
        }
        const std::string headline = spec.kind == CellKind::SequentialInteger ? "d1 in {0,1}" : "all";
        for (double b : bs) {
            const std::size_t n_rows = 1 + (result.cells.empty() ? 0 : result.cells.front().breakdown.size());
            for (std::size_t row = 0; row < n_rows; ++row) {
                std::string label = headline;
                std::string line;
                for (long T : sizes) {
                    for (const CellResult& c : result.cells) {
                        if (c.cell.b == b && c.cell.T == T) {
                            if (row > 0) {
                                label = c.breakdown[row - 1].label;
                            }
                            line += "," + format_rate(row == 0 ? c.rate : c.breakdown[row - 1].rate);
                        }
                    }
                }
                out << format_number(b) << ",\"" << label << '"' << line << '\n';
            }
        }
        return;
    }

    std::vector<double> xs;
    for (const CellResult& c : result.cells) {
        if (std::find(xs.begin(), xs.end(), c.cell.x) == xs.end()) {
            xs.push_back(c.cell.x);
        }
    }
    const char* xname = spec.kind == CellKind::LocalAlternative ? "c" : "d1";
    out << "b,q_rule,T";
    for (double x : xs) {
        out << ',' << xname << '=' << format_number(x);
    }
    out << '\n';
    // Rows in first-appearance order of (rule, b, T).
    std::vector<std::tuple<BandwidthRule, double, long>> rows;
    for (const CellResult& c : result.cells) {
        const auto key = std::make_tuple(c.cell.q_rule, c.cell.b, c.cell.T);
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) {
            rows.push_back(key);
        }
    }
    for (const auto& [rule, b, T] : rows) {
        out << format_number(b) << ',' << to_string(rule) << ',' << T;
        for (double x : xs) {
            out << ',';
            for (const CellResult& c : result.cells) {
                if (c.cell.q_rule == rule && c.cell.b == b && c.cell.T == T && c.cell.x == x) {
                    out << format_rate(c.rate);
                }
            }
        }
        out << '\n';
    }
}

nlohmann::json to_json(const ExperimentResult& result)
{
    const ExperimentSpec& spec = result.spec;
    nlohmann::json cells = nlohmann::json::array();
    for (const CellResult& c : result.cells) {
        nlohmann::json j{
            {"T", c.cell.T},
            {"b", c.cell.b},
            {"q_rule", to_string(c.cell.q_rule)},
            {"q", bandwidth(c.cell.q_rule, c.cell.T)},
            {"rate", c.rate},
            {"std_error", c.std_error},
            {"n_valid", c.n_valid},
            {"n_failed", c.n_failed},
            {"invalid", c.invalid},
            {"wall_seconds", c.wall_seconds},
        };
        if (spec.kind == CellKind::LocalAlternative) {
            j["c"] = c.cell.x;
        } else if (!is_sequential(spec.kind)) {
            j["d1"] = c.cell.x;
        }
        if (!c.breakdown.empty()) {
            nlohmann::json rows = nlohmann::json::array();
            for (const SubRate& s : c.breakdown) {
                rows.push_back({{"case", s.label}, {"rate", s.rate}, {"n", s.n}, {"std_error", s.std_error}});
            }
            j["breakdown"] = std::move(rows);
        }
        cells.push_back(std::move(j));
    }
    return {
        {"schema", "intorder.experiment/1"},
        {"table_id", spec.table_id},
        {"kind", to_string(spec.kind)},
        {"order", spec.order},
        {"n_reps", spec.n_reps},
        {"alpha", spec.alpha},
        {"base_seed", spec.base_seed},
        {"grid_size", spec.grid_size},
        {"cells", std::move(cells)},
    };
}

void write_plot_data(std::ostream& out, const ExperimentResult& result)
{
    const ExperimentSpec& spec = result.spec;
    out << "# " << spec.table_id << ' ' << to_string(spec.kind) << '\n';
    if (is_sequential(spec.kind)) {
        out << "# b T rate std_error\n";
        for (const CellResult& c : result.cells) {
            out << format_number(c.cell.b) << ' ' << c.cell.T << ' ' << c.rate << ' ' << c.std_error << '\n';
        }
        return;
    }
    std::vector<std::tuple<BandwidthRule, double, long>> blocks;
    for (const CellResult& c : result.cells) {
        const auto key = std::make_tuple(c.cell.q_rule, c.cell.b, c.cell.T);
        if (std::find(blocks.begin(), blocks.end(), key) == blocks.end()) {
            blocks.push_back(key);
        }
    }
    bool first = true;
    for (const auto& [rule, b, T] : blocks) {
        if (!first) {
            out << "\n\n";
        }
        first = false;
        out << "# b=" << format_number(b) << " q_rule=" << to_string(rule) << " T=" << T << '\n';
        out << (spec.kind == CellKind::LocalAlternative ? "# c" : "# d1") << " rate std_error\n";
        for (const CellResult& c : result.cells) {
            if (c.cell.q_rule == rule && c.cell.b == b && c.cell.T == T) {
                out << format_number(c.cell.x) << ' ' << c.rate << ' ' << c.std_error << '\n';
            }
        }
    }
}

}  // namespace intorder
