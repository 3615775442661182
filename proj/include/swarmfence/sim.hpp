#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "swarmfence/config.hpp"
#include "swarmfence/controller.hpp"
#include "swarmfence/nest.hpp"
#include "swarmfence/signal_model.hpp"

namespace swarmfence {

struct Target {
    Vec2 position;
    bool alive = true;
};

// Uniform-grid index over targets so per-tick detection stays O(1) per robot.
class TargetIndex {
public:
    TargetIndex() = default;
    TargetIndex(const std::vector<Target>& targets, double cell_size);

    // Marks every alive target within `radius` of `pos` as found.
    // Returns how many were found this call.
    int collect(std::vector<Target>& targets, const Vec2& pos, double radius);

private:
    std::int64_t key(double x, double y) const;
    double cell_size_ = 1.0;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

// Per-repetition results, sampled at 1 Hz simulated time.
struct RunMetrics {
    std::vector<double> sample_times;
    std::vector<int> targets_found;                    // cumulative, per sample
    std::vector<double> d_r_grid;                      // queried radii
    std::vector<std::vector<int>> within_counts;       // [sample][d_r index]
    std::vector<std::vector<double>> robot_distances;  // [sample][robot], optional
    double nest_arrival_time = -1.0;  // first sample time with mission complete
    int initial_targets = 0;
    int final_targets_found = 0;

    // time-average of the within-count over the trailing `window` seconds
    // ending at `end_time` (end_time < 0 means the last sample)
    double mean_within(std::size_t dr_index, double window, double end_time = -1.0) const;
    // cumulative targets found at time t (last sample <= t)
    int targets_found_at(double t) const;
};

struct RunOptions {
    std::vector<double> d_r_grid;    // radii for within-counts
    int target_count = 0;            // uniform over the arena when > 0
    bool record_robot_distances = false;
    std::ostream* trace = nullptr;   // per-step trace rows: t,robot_id,x,y,A_curr,P_t
    std::optional<SweepPlan> mission;  // default: stationary nest (v_n ignored)
};

struct World {
    SimConfig config;
    ArenaSpec arena;
    SignalModel signal;
    BehaviourMode behaviour;
    NestState nest;
    SweepPlan mission;
    std::vector<RobotState> robots;
    std::vector<Target> targets;
    TargetIndex target_index;
    long clock = 0;  // completed steps
    int targets_found = 0;
    RngStream boundary_rng;  // inward-heading draws for the Bounded wall

    std::vector<Vec2> robot_positions() const;
};

// Builds the initial world: nest at the arena-defined start (mission start
// when moving, arena centre otherwise), robots uniform within 2 m of the
// nest with uniform headings, targets uniform over the arena. All draws come
// from streams derived from (seed, repetition, channel).
World spawn(const SimConfig& config, const ArenaSpec& arena, const SignalModel& signal,
            std::uint64_t seed, std::uint64_t repetition, const RunOptions& opts);

// One simulation step: nest, then per-robot sense + motion, then the Bounded
// wall rule, then target detection.
void tick(World& world);

int robots_within(const World& world, double d_r);

RunMetrics run(const SimConfig& config, const ArenaSpec& arena, const SignalModel& signal,
               std::uint64_t seed, std::uint64_t repetition, const RunOptions& opts);

void write_metrics_csv(std::ostream& out, const RunMetrics& metrics, std::uint64_t repetition);

}  // namespace swarmfence
