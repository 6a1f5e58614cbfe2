#pragma once

// Monte Carlo experiments over the simulation design: size and correct
// rejection rates, sequential classification frequencies, the demeaned
// test, bandwidth sensitivity and local-to-zero alternatives.

#include "intorder/dgp.hpp"
#include "intorder/lrcov.hpp"
#include "intorder/vtests.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace intorder {

enum class CellKind {
    SizePower,             // V0 or V1 under a fixed d1
    Demeaned,              // demeaned V0 with an intercept in the DGP
    LocalAlternative,      // V0 with d1 = c / log(T/q)
    SequentialInteger,     // d1 drawn from {0, 1}
    SequentialFractional,  // d1 drawn from four fractional ranges
};

std::string_view to_string(CellKind kind);

struct Cell {
    long T = 250;
    double b = 0.15;
    double x = 0.0;  // d1 for SizePower/Demeaned, c for LocalAlternative, unused otherwise
    BandwidthRule q_rule = BandwidthRule::PowerFifth;

    // Stable text key; feeds the per-cell seed.
    std::string key() const;
};

struct ExperimentSpec {
    std::string table_id = "custom";
    CellKind kind = CellKind::SizePower;
    int order = 0;  // SizePower only: 0 tests I(0), 1 tests I(1)
    std::vector<Cell> cells;
    std::size_t n_reps = 2000;
    double alpha = 0.025;
    std::uint64_t base_seed = 1;
    std::size_t grid_size = 101;
};

void validate(const ExperimentSpec& spec);

struct SubRate {
    std::string label;
    double rate = 0.0;
    std::size_t n = 0;
    double std_error = 0.0;
};

struct CellResult {
    Cell cell;
    double rate = 0.0;
    double std_error = 0.0;  // sqrt(r (1 - r) / n)
    std::size_t n_valid = 0;
    std::size_t n_failed = 0;
    bool invalid = false;  // more than 1% of replications failed
    double wall_seconds = 0.0;
    std::vector<SubRate> breakdown;  // sequential tables only
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<CellResult> cells;
};

// Seed of replication `rep` in `cell`; depends only on its arguments.
std::uint64_t replication_seed(const ExperimentSpec& spec, const Cell& cell, std::size_t rep);

// One replication. `hit` is whether the counted event happened; `group`
// indexes the breakdown row (sequential tables), -1 when unused.
struct Replication {
    bool ok = false;
    bool hit = false;
    int group = -1;
    double statistic = 0.0;
};

Replication run_replication(const ExperimentSpec& spec, const Cell& cell, std::size_t rep, const CriticalValues& cv);

ExperimentResult run_size_power(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads = 0);
ExperimentResult run_demeaned_table(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads = 0);
ExperimentResult run_local_alternatives(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads = 0);
ExperimentResult run_sequential_table(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads = 0);
ExperimentResult run_experiment(const ExperimentSpec& spec, const CriticalValues& cv, unsigned threads = 0);

// Named presets: t1a t1b t2a t2b t3 s4 s5 s6 s7 s8 s9, "t2" for both halves
// of the sequential table, and a "-desk" suffix for 500 replications with
// T <= 500.
std::vector<ExperimentSpec> preset(std::string_view name);
std::vector<std::string> preset_names();

// Wide layout: rows are (b, bandwidth rule, T), columns the d1 or c values;
// sequential tables put the case in rows and T in columns.
void write_table_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json to_json(const ExperimentResult& result);
// gnuplot blocks "x rate std_error", one block per (b, bandwidth rule, T).
void write_plot_data(std::ostream& out, const ExperimentResult& result);

}  // namespace intorder
