#include "swarmfence/controller.hpp"

#include <cmath>
#include <numbers>

namespace swarmfence {

double update_turn_probability(double intensity_curr, double intensity_prev,
                               double threshold, double P_b, double M, double D) {
    double p = P_b;
    if (intensity_curr < threshold) {
        if (intensity_curr < intensity_prev) p = P_b * M;
        else if (intensity_curr > intensity_prev) p = P_b / D;
    }
    return p;
}

void sense_step(RobotState& robot, const SignalModel& model, const Vec2& nest_pos,
                const BehaviourMode& behaviour, const SimConfig& cfg, long step_index) {
    double d = distance(robot.position, nest_pos);
    robot.filter.push(noisy_sample(model, d, robot.rng));

    if ((step_index + 1) % cfg.steps_per_sense != 0) return;

    double committed = filtered_intensity(robot.filter);
    if (!robot.has_committed) {
        // first commit: no history yet, both comparison branches stay false
        robot.intensity_prev = committed;
        robot.has_committed = true;
    } else {
        robot.intensity_prev = robot.intensity_curr;
    }
    robot.intensity_curr = committed;

    if (behaviour.chemotaxis) {
        robot.turn_probability = update_turn_probability(
            robot.intensity_curr, robot.intensity_prev, behaviour.threshold,
            cfg.P_b, cfg.M, cfg.D);
    } else {
        robot.turn_probability = cfg.P_b;
    }
}

void motion_step(RobotState& robot, double v_r, double dt, double turn_rate_deg) {
    constexpr double deg = std::numbers::pi / 180.0;

    auto rotate = [&](double max_step) {
        double step = std::min(std::abs(robot.turn_remaining), max_step);
        robot.heading += std::copysign(step, robot.turn_remaining);
        robot.turn_remaining -= std::copysign(step, robot.turn_remaining);
        // keep the heading bounded over long runs
        robot.heading = std::remainder(robot.heading, 2.0 * std::numbers::pi);
    };

    if (robot.turn_remaining != 0.0) {
        rotate(turn_rate_deg * deg * dt);
        return;
    }
    if (robot.rng.uniform() < robot.turn_probability) {
        double sign = robot.rng.uniform() < 0.5 ? 1.0 : -1.0;
        double magnitude = std::abs(robot.rng.normal(180.0, 90.0));
        robot.turn_remaining = sign * magnitude * deg;
        rotate(turn_rate_deg > 0.0 ? turn_rate_deg * deg * dt
                                   : std::abs(robot.turn_remaining));
    } else {
        robot.position.x += v_r * dt * std::cos(robot.heading);
        robot.position.y += v_r * dt * std::sin(robot.heading);
    }
}

}  // namespace swarmfence
