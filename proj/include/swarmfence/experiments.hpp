#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmfence/sim.hpp"

namespace swarmfence {

enum class ExperimentKind { Containment, HeatmapSweep, StationarySearch, MovingSearch, Custom };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Containment;
    SimConfig base;                 // defaults; grids override per tuple
    SignalModel signal;
    std::vector<double> d_c_grid;
    std::vector<double> M_grid;
    std::vector<double> D_grid;
    std::vector<double> v_n_grid;
    std::vector<Mode> mode_grid;
    std::vector<double> d_r_grid;   // metric radii
    std::vector<double> metric_times;  // report times for target searches
    double lane_spacing = 25.0;        // moving-search sweep lanes
    int repetitions = 30;
    std::uint64_t base_seed = 1;
};

// Grids and metric defaults for each named experiment kind.
ExperimentSpec default_spec(ExperimentKind kind);

ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

struct Stats {
    double mean = 0.0;
    std::optional<double> ci95;  // 1.96 * sample std / sqrt(n); null when n < 2
    int count = 0;
};

// Sample mean and normal-approximation 95% CI half-width.
Stats summarize(const std::vector<double>& samples);

struct SummaryRow {
    std::map<std::string, std::string> params;  // full parameter tuple
    std::string metric;
    Stats stats;
};

using SummaryTable = std::vector<SummaryRow>;

// Table 1: stationary nest, d_c grid x d_r grid, mean robots within d_r.
// Metric is the time-average over the final 500 s (endpoint value is also
// emitted as metric "within_endpoint").
SummaryTable run_containment(const ExperimentSpec& spec, int workers = 1);

// Fig. 2: M x D x v_n grid, d_c = 10, mean robots within d_r in {10, 16}.
// Moving cells run the 100 m straight mission; the averaging window ends at
// mission completion.
SummaryTable run_heatmap(const ExperimentSpec& spec, int workers = 1);

// Table 2: 100 targets in a 14 m disc, Bounded / Unbounded / Chemotaxis
// (d_c grid), targets found at each metric time.
SummaryTable run_stationary_search(const ExperimentSpec& spec, int workers = 1);

// Table 3: 100 targets in a 100x100 arena, sweeping nest at each v_n plus
// stationary Bounded / Unbounded baselines.
SummaryTable run_moving_search(const ExperimentSpec& spec, int workers = 1);

SummaryTable run_experiment(const ExperimentSpec& spec, int workers = 1);

void write_summary_csv(std::ostream& out, const SummaryTable& table);
SummaryTable read_summary_csv(std::istream& in);

// Pivots a summary table into a paper-style grid (rows x columns of means)
// for the report subcommand.
std::string format_table(const SummaryTable& table, const std::string& row_key,
                         const std::string& col_key, const std::string& metric);

// Runs an experiment and writes summary.csv + metadata.json under out_dir.
void run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir, int workers);

}  // namespace swarmfence
