#pragma once

#include "swarmfence/config.hpp"
#include "swarmfence/rng.hpp"
#include "swarmfence/signal_model.hpp"
#include "swarmfence/vec2.hpp"

namespace swarmfence {

// Chemotaxis gates on the activation threshold A(d_c); PureRandomWalk is the
// Bounded/Unbounded baseline behaviour (turn probability fixed at P_b).
struct BehaviourMode {
    bool chemotaxis = true;
    double threshold = 0.0;  // A(d_c), only meaningful when chemotaxis

    static BehaviourMode chemotaxis_mode(double threshold) { return {true, threshold}; }
    static BehaviourMode pure_random_walk() { return {false, 0.0}; }
};

struct RobotState {
    Vec2 position;
    double heading = 0.0;  // radians
    FilterWindow filter;
    double intensity_prev = 0.0;  // last committed sensed intensity
    double intensity_curr = 0.0;  // current committed sensed intensity
    bool has_committed = false;
    double turn_probability = 0.0;
    double turn_remaining = 0.0;  // signed radians left of an in-progress pirouette
    RngStream rng;

    RobotState(Vec2 pos, double heading_, int filter_capacity, RngStream rng_)
        : position(pos), heading(heading_), filter(filter_capacity), rng(rng_) {}
};

// Turn-probability update rule: default P_b; below the activation threshold,
// a falling signal gives P_b * M, a rising one P_b / D. Exact equality of
// consecutive intensities leaves P_b.
double update_turn_probability(double intensity_curr, double intensity_prev,
                               double threshold, double P_b, double M, double D);

// Per-step sensing: pushes one noisy sample of the nest signal into the
// filter every step; on commit steps (every steps_per_sense) shifts the
// committed pair and recomputes the turn probability. step_index counts
// ticks from 0; the commit happens when (step_index + 1) % steps_per_sense == 0,
// i.e. on the step that completes each sensing second.
void sense_step(RobotState& robot, const SignalModel& model, const Vec2& nest_pos,
                const BehaviourMode& behaviour, const SimConfig& cfg, long step_index);

// Run-and-pirouette motion: with probability P_t the robot starts an in-place
// turn of magnitude |N(180deg, 90deg)| with an equiprobable sign; otherwise it
// moves v_r * dt along its heading. With turn_rate_deg == 0 the whole turn
// completes in one step; with a finite rate the robot rotates at most
// turn_rate_deg * dt per step and does not translate until the turn finishes.
void motion_step(RobotState& robot, double v_r, double dt, double turn_rate_deg = 0.0);

}  // namespace swarmfence
