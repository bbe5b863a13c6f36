#ifndef CTPUT_HARNESS_HPP
#define CTPUT_HARNESS_HPP

// Experiment orchestration: evaluate every requested (loss rate, model)
// cell, assemble the window/goodput tables, and emit figure data.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctput/config.hpp"
#include "ctput/limit.hpp"
#include "ctput/stochastic.hpp"

namespace ctput {

struct ResultCell {
    bool ok = false;
    double mean_window = 0.0;
    double goodput = 0.0;
    double ci_halfwidth = 0.0;
    double rel_err = std::numeric_limits<double>::quiet_NaN();  // vs baseline window
    std::string note;  // never contains commas
};

struct ResultRow {
    double p = 0.0;
    std::array<std::optional<ResultCell>, kNumModels> cells;
    std::optional<ReferencePoint> reference;
};

struct TableResult {
    std::vector<ResultRow> rows;
    std::optional<GbarEstimate> gbar;  // computed once, reused per row
    bool all_ok = true;
};

// One row per loss rate; a failing model marks its cell and the run
// continues. Deterministic given config + seed.
TableResult run_tables(const ExperimentConfig& cfg);

// CSV schema: p,model,mean_window_packets,goodput_pkts_per_sec,ci_halfwidth,notes
std::string tables_csv(const TableResult& table);
// Aligned window and goodput tables, one column per model.
std::string tables_markdown(const TableResult& table);

// Writes tables.csv (and tables.md when format == "md") under
// cfg.out_dir; returns the paths written.
std::vector<std::string> write_tables(const TableResult& table, const ExperimentConfig& cfg);

// Fluid sawtooth trajectories (x0 = 10 and 100 at p = 1e-3) and the
// running-mean traces of the scaled inter-loss time for three initial
// conditions. Returns the paths written.
std::vector<std::string> run_figures(const ExperimentConfig& cfg);

// Deterministic stream-id layout for everything the harness runs.
namespace streams {
inline constexpr uint64_t kMeanGbar = 1;
inline constexpr uint64_t kFigureTraceBase = 2;    // + index of the initial condition
inline constexpr uint64_t kSimCellBase = 1 << 16;  // + p_index * kReplicaSpan + replica
inline constexpr uint64_t kReplicaSpan = 256;
}  // namespace streams

}  // namespace ctput

#endif
