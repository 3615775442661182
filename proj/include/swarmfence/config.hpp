#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmfence/vec2.hpp"

namespace swarmfence {

enum class Mode { Chemotaxis, Bounded, Unbounded };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Full simulation parameter record. Construct, then pass through
// validate_config() before use; downstream code assumes a validated record.
struct SimConfig {
    double dt = 0.025;           // seconds per time step
    double v_r = 0.605;          // robot speed, m/s
    double P_b = 0.0025;         // base turn probability per time step
    double M = 10.0;             // turn-probability multiplier
    double D = 1000.0;           // turn-probability divisor
    double d_c = 10.0;           // chemotaxis activation distance, m
    int n = 40;                  // averaging-filter window, time steps
    double sense_period = 1.0;   // seconds between sensed-signal commits
    double v_n = 0.0;            // nest speed as a fraction of v_r
    double d_n = 0.1;            // nest front-region stop distance, m
    double t_max = 1500.0;       // simulated seconds
    int swarm_size = 10;
    double robot_radius = 0.175; // target-detection radius, m
    double turn_rate = 0.0;      // pirouette angular speed, deg/s; 0 = instant turn
    Mode mode = Mode::Chemotaxis;
    std::uint64_t seed = 1;
    int repetitions = 30;

    // derived by validate_config
    int steps_per_sense = 40;
    long total_steps() const { return static_cast<long>(t_max / dt + 0.5); }
};

struct ArenaSpec {
    enum class Shape { Circle, Rectangle };
    Shape shape = Shape::Circle;
    double radius = 14.0;        // circle only
    double width = 0.0;          // rectangle only
    double height = 0.0;         // rectangle only
    Vec2 origin;                 // circle: centre; rectangle: lower-left corner
    bool walled = false;

    Vec2 center() const {
        if (shape == Shape::Circle) return origin;
        return {origin.x + width / 2.0, origin.y + height / 2.0};
    }
    bool contains(const Vec2& p) const {
        if (shape == Shape::Circle) return distance(p, origin) <= radius;
        return p.x >= origin.x && p.x <= origin.x + width &&
               p.y >= origin.y && p.y <= origin.y + height;
    }
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checks every invariant; throws ConfigError listing all violated fields.
// On success returns the config with derived quantities (steps_per_sense)
// filled in.
SimConfig validate_config(SimConfig raw);

void validate_arena(const ArenaSpec& arena);

// Strict JSON round-trip for {SimConfig fields..., "arena": ArenaSpec}.
// Unknown keys at either level are an error.
struct RunConfig {
    SimConfig sim;
    ArenaSpec arena;
};

RunConfig parse_run_config(const std::string& json_text);
std::string serialize_run_config(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

}  // namespace swarmfence
