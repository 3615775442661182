#include "swarmfence/nest.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmfence {

namespace {

void append_checkpoint(std::vector<Vec2>& list, Vec2 p) {
    if (!list.empty()) {
        const Vec2& last = list.back();
        if (last.x == p.x && last.y == p.y) return;
    }
    list.push_back(p);
}

// lane coordinates across [0, extent]: multiples of spacing plus the far edge
std::vector<double> lanes(double extent, double spacing) {
    std::vector<double> out;
    for (double v = 0.0; v < extent - 1e-9; v += spacing) out.push_back(v);
    out.push_back(extent);
    return out;
}

}  // namespace

SweepPlan plan_sweep(const ArenaSpec& arena, double lane_spacing) {
    if (arena.shape != ArenaSpec::Shape::Rectangle)
        throw std::invalid_argument("plan_sweep: only rectangular arenas are supported");
    if (lane_spacing <= 0.0 || lane_spacing > arena.width || lane_spacing > arena.height)
        throw std::invalid_argument("plan_sweep: lane_spacing must be in (0, min(width, height)]");

    const double x0 = arena.origin.x;
    const double y0 = arena.origin.y;
    SweepPlan plan;
    plan.cycle = true;

    // vertical phase: serpentine columns
    bool at_top = false;
    for (double x : lanes(arena.width, lane_spacing)) {
        append_checkpoint(plan.checkpoints, {x0 + x, at_top ? y0 + arena.height : y0});
        at_top = !at_top;
        append_checkpoint(plan.checkpoints, {x0 + x, at_top ? y0 + arena.height : y0});
    }
    // horizontal phase: serpentine rows, entered along the right edge so the
    // phase transition stays on the arena boundary
    bool at_right = true;
    for (double y : lanes(arena.height, lane_spacing)) {
        append_checkpoint(plan.checkpoints, {at_right ? x0 + arena.width : x0, y0 + y});
        at_right = !at_right;
        append_checkpoint(plan.checkpoints, {at_right ? x0 + arena.width : x0, y0 + y});
    }
    return plan;
}

SweepPlan straight_mission(Vec2 start, double length) {
    if (length <= 0.0) throw std::invalid_argument("straight_mission: length must be > 0");
    SweepPlan plan;
    plan.cycle = false;
    plan.checkpoints = {start, {start.x + length, start.y}};
    return plan;
}

void nest_step(NestState& nest, const SweepPlan& plan, std::span<const Vec2> robot_positions,
               double v_n, double v_r, double dt, double d_n, double arrive_tol) {
    nest.waiting = false;
    if (v_n <= 0.0 || nest.mission_complete) return;
    if (plan.empty())
        throw std::invalid_argument("nest_step: moving nest requires a checkpoint plan");

    // front region: half-disc of radius d_n around the heading
    Vec2 dir{std::cos(nest.heading), std::sin(nest.heading)};
    for (const Vec2& r : robot_positions) {
        Vec2 off = r - nest.position;
        if (off.norm() <= d_n && off.dot(dir) >= 0.0) {
            nest.waiting = true;
            return;
        }
    }

    double budget = v_n * v_r * dt;
    while (budget > 0.0) {
        const Vec2& goal = plan.checkpoints[nest.next_checkpoint];
        Vec2 to_goal = goal - nest.position;
        double dist = to_goal.norm();
        if (dist <= arrive_tol) {
            if (nest.next_checkpoint + 1 < plan.checkpoints.size()) {
                ++nest.next_checkpoint;
            } else if (plan.cycle) {
                nest.next_checkpoint = 0;
            } else {
                nest.mission_complete = true;
                return;
            }
            continue;
        }
        double step = std::min(budget, dist);
        nest.heading = std::atan2(to_goal.y, to_goal.x);
        nest.position = nest.position + to_goal * (step / dist);
        nest.distance_travelled += step;
        budget -= step;
    }
}

}  // namespace swarmfence
