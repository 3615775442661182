#pragma once

#include <span>
#include <vector>

#include "swarmfence/config.hpp"
#include "swarmfence/vec2.hpp"

namespace swarmfence {

// Checkpoint plan for the nest. Sweeps cycle until t_max; straight missions
// stop at the terminal checkpoint.
struct SweepPlan {
    std::vector<Vec2> checkpoints;
    bool cycle = false;

    bool empty() const { return checkpoints.empty(); }
};

struct NestState {
    Vec2 position;
    double heading = 0.0;  // towards the current checkpoint while moving
    std::size_t next_checkpoint = 0;
    bool waiting = false;
    bool mission_complete = false;  // straight missions only
    double distance_travelled = 0.0;
};

// Boustrophedon coverage of a rectangular arena: a vertical phase (columns
// lane_spacing apart, serpentine top/bottom alternation) followed by a
// horizontal phase (rows likewise), cycled. Both arena edges are always
// included as lanes. Throws std::invalid_argument for non-rectangular
// arenas or spacing outside (0, min(width, height)].
SweepPlan plan_sweep(const ArenaSpec& arena, double lane_spacing);

// Two checkpoints: start and start + length along +x; no cycling. After the
// terminal checkpoint the nest holds position.
SweepPlan straight_mission(Vec2 start, double length);

// One nest tick. The nest waits (zero displacement) whenever any robot lies
// within d_n of its centre and within +-90 degrees of its heading; otherwise
// it advances v_n * v_r * dt toward the current checkpoint, popping
// checkpoints on arrival within arrive_tol.
void nest_step(NestState& nest, const SweepPlan& plan, std::span<const Vec2> robot_positions,
               double v_n, double v_r, double dt, double d_n, double arrive_tol = 0.5);

}  // namespace swarmfence
