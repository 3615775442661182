#include "swarmfence/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace swarmfence {

namespace {

// rng channel tags; robots use their index directly
constexpr std::uint64_t kChannelSpawn = 0xA000000000000001ULL;
constexpr std::uint64_t kChannelTargets = 0xA000000000000002ULL;
constexpr std::uint64_t kChannelBoundary = 0xA000000000000003ULL;

Vec2 uniform_point_in_disc(RngStream& rng, const Vec2& center, double radius) {
    // rejection keeps the distribution exactly uniform
    for (;;) {
        double x = rng.uniform(-radius, radius);
        double y = rng.uniform(-radius, radius);
        if (x * x + y * y <= radius * radius) return {center.x + x, center.y + y};
    }
}

Vec2 uniform_point_in_arena(RngStream& rng, const ArenaSpec& arena) {
    if (arena.shape == ArenaSpec::Shape::Circle)
        return uniform_point_in_disc(rng, arena.origin, arena.radius);
    return {rng.uniform(arena.origin.x, arena.origin.x + arena.width),
            rng.uniform(arena.origin.y, arena.origin.y + arena.height)};
}

// Bounded wall: clamp an escaped robot back onto the boundary and give it a
// uniform random heading that points into the arena.
void apply_wall(RobotState& robot, const ArenaSpec& arena, RngStream& rng) {
    if (arena.contains(robot.position)) return;
    Vec2 inward;
    if (arena.shape == ArenaSpec::Shape::Circle) {
        Vec2 off = robot.position - arena.origin;
        double d = off.norm();
        // pull fractionally inside so rounding cannot leave the point outside
        robot.position = arena.origin + off * (arena.radius * (1.0 - 1e-12) / d);
        inward = {-off.x / d, -off.y / d};
    } else {
        double xlo = arena.origin.x, xhi = arena.origin.x + arena.width;
        double ylo = arena.origin.y, yhi = arena.origin.y + arena.height;
        Vec2 clamped{std::clamp(robot.position.x, xlo, xhi),
                     std::clamp(robot.position.y, ylo, yhi)};
        Vec2 center = arena.center();
        robot.position = clamped;
        inward = center - clamped;
        double n = inward.norm();
        inward = n > 0.0 ? inward * (1.0 / n) : Vec2{1.0, 0.0};
    }
    // rejection-sample a heading in the inward half-plane
    for (;;) {
        double h = rng.uniform(0.0, 2.0 * std::numbers::pi);
        if (std::cos(h) * inward.x + std::sin(h) * inward.y > 0.0) {
            robot.heading = h;
            return;
        }
    }
}

}  // namespace

TargetIndex::TargetIndex(const std::vector<Target>& targets, double cell_size)
    : cell_size_(cell_size) {
    for (int i = 0; i < static_cast<int>(targets.size()); ++i)
        cells_[key(targets[static_cast<std::size_t>(i)].position.x,
                   targets[static_cast<std::size_t>(i)].position.y)].push_back(i);
}

std::int64_t TargetIndex::key(double x, double y) const {
    auto cx = static_cast<std::int64_t>(std::floor(x / cell_size_));
    auto cy = static_cast<std::int64_t>(std::floor(y / cell_size_));
    return (cx << 32) ^ (cy & 0xFFFFFFFFLL);
}

int TargetIndex::collect(std::vector<Target>& targets, const Vec2& pos, double radius) {
    int found = 0;
    auto cx = static_cast<std::int64_t>(std::floor(pos.x / cell_size_));
    auto cy = static_cast<std::int64_t>(std::floor(pos.y / cell_size_));
    int reach = static_cast<int>(std::ceil(radius / cell_size_));
    for (std::int64_t ix = cx - reach; ix <= cx + reach; ++ix) {
        for (std::int64_t iy = cy - reach; iy <= cy + reach; ++iy) {
            auto it = cells_.find((ix << 32) ^ (iy & 0xFFFFFFFFLL));
            if (it == cells_.end()) continue;
            auto& bucket = it->second;
            for (std::size_t k = 0; k < bucket.size();) {
                Target& t = targets[static_cast<std::size_t>(bucket[k])];
                if (t.alive && distance(t.position, pos) < radius) {
                    t.alive = false;
                    ++found;
                    bucket[k] = bucket.back();
                    bucket.pop_back();
                } else {
                    ++k;
                }
            }
        }
    }
    return found;
}

std::vector<Vec2> World::robot_positions() const {
    std::vector<Vec2> out;
    out.reserve(robots.size());
    for (const auto& r : robots) out.push_back(r.position);
    return out;
}

World spawn(const SimConfig& config, const ArenaSpec& arena, const SignalModel& signal,
            std::uint64_t seed, std::uint64_t repetition, const RunOptions& opts) {
    constexpr double kSpawnRadius = 2.0;
    World world{
        .config = config,
        .arena = arena,
        .signal = signal,
        .behaviour = config.mode == Mode::Chemotaxis
                         ? BehaviourMode::chemotaxis_mode(threshold_for_distance(signal, config.d_c))
                         : BehaviourMode::pure_random_walk(),
        .nest = {},
        .mission = {},
        .robots = {},
        .targets = {},
        .target_index = {},
        .clock = 0,
        .targets_found = 0,
        .boundary_rng = RngStream(derive_seed(seed, {repetition, kChannelBoundary})),
    };

    if (config.v_n > 0.0) {
        if (!opts.mission || opts.mission->empty())
            throw std::invalid_argument("spawn: moving nest (v_n > 0) requires a checkpoint plan");
        world.mission = *opts.mission;
        world.nest.position = world.mission.checkpoints.front();
        if (world.mission.checkpoints.size() > 1) {
            Vec2 to = world.mission.checkpoints[1] - world.nest.position;
            world.nest.heading = std::atan2(to.y, to.x);
        }
    } else {
        world.nest.position = arena.center();
    }

    if (arena.shape == ArenaSpec::Shape::Circle && arena.radius < kSpawnRadius &&
        config.swarm_size > 1)
        throw std::invalid_argument("spawn: arena too small for the spawn disc");

    RngStream spawn_rng(derive_seed(seed, {repetition, kChannelSpawn}));
    world.robots.reserve(static_cast<std::size_t>(config.swarm_size));
    for (int i = 0; i < config.swarm_size; ++i) {
        Vec2 pos = uniform_point_in_disc(spawn_rng, world.nest.position, kSpawnRadius);
        double heading = spawn_rng.uniform(0.0, 2.0 * std::numbers::pi);
        RngStream stream(derive_seed(seed, {repetition, static_cast<std::uint64_t>(i)}));
        world.robots.emplace_back(pos, heading, config.n, stream);
        world.robots.back().turn_probability = config.P_b;
    }

    if (opts.target_count > 0) {
        RngStream target_rng(derive_seed(seed, {repetition, kChannelTargets}));
        world.targets.reserve(static_cast<std::size_t>(opts.target_count));
        for (int i = 0; i < opts.target_count; ++i)
            world.targets.push_back({uniform_point_in_arena(target_rng, arena), true});
        world.target_index = TargetIndex(world.targets, std::max(1.0, 4.0 * config.robot_radius));
    }
    return world;
}

void tick(World& world) {
    const SimConfig& cfg = world.config;

    if (cfg.v_n > 0.0 && !world.mission.empty()) {
        auto positions = world.robot_positions();
        nest_step(world.nest, world.mission, positions, cfg.v_n, cfg.v_r, cfg.dt, cfg.d_n);
    }

    const bool walled = cfg.mode == Mode::Bounded;
    for (auto& robot : world.robots) {
        sense_step(robot, world.signal, world.nest.position, world.behaviour, cfg, world.clock);
        motion_step(robot, cfg.v_r, cfg.dt, cfg.turn_rate);
        if (walled) apply_wall(robot, world.arena, world.boundary_rng);
        if (!world.targets.empty())
            world.targets_found +=
                world.target_index.collect(world.targets, robot.position, cfg.robot_radius);
    }
    ++world.clock;
}

int robots_within(const World& world, double d_r) {
    assert(d_r > 0.0);
    int count = 0;
    for (const auto& r : world.robots)
        if (distance(r.position, world.nest.position) <= d_r) ++count;
    return count;
}

RunMetrics run(const SimConfig& config, const ArenaSpec& arena, const SignalModel& signal,
               std::uint64_t seed, std::uint64_t repetition, const RunOptions& opts) {
    World world = spawn(config, arena, signal, seed, repetition, opts);
    RunMetrics metrics;
    metrics.d_r_grid = opts.d_r_grid;
    metrics.initial_targets = static_cast<int>(world.targets.size());

    const long total = config.total_steps();
    const long steps_per_second = std::max(1L, static_cast<long>(std::round(1.0 / config.dt)));

    auto sample = [&](double t) {
        metrics.sample_times.push_back(t);
        metrics.targets_found.push_back(world.targets_found);
        std::vector<int> counts;
        counts.reserve(opts.d_r_grid.size());
        for (double d_r : opts.d_r_grid) counts.push_back(robots_within(world, d_r));
        metrics.within_counts.push_back(std::move(counts));
        if (opts.record_robot_distances) {
            std::vector<double> dists;
            dists.reserve(world.robots.size());
            for (const auto& r : world.robots)
                dists.push_back(distance(r.position, world.nest.position));
            metrics.robot_distances.push_back(std::move(dists));
        }
        if (world.nest.mission_complete && metrics.nest_arrival_time < 0.0)
            metrics.nest_arrival_time = t;
    };

    for (long step = 0; step < total; ++step) {
        tick(world);
        if (opts.trace) {
            for (std::size_t i = 0; i < world.robots.size(); ++i) {
                const auto& r = world.robots[i];
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%.6f,%zu,%.6f,%.6f,%.6f,%.9f\n",
                              static_cast<double>(step + 1) * config.dt, i, r.position.x,
                              r.position.y, r.intensity_curr, r.turn_probability);
                *opts.trace << buf;
            }
        }
        if ((step + 1) % steps_per_second == 0)
            sample(static_cast<double>(step + 1) * config.dt);
    }
    metrics.final_targets_found = world.targets_found;
    return metrics;
}

double RunMetrics::mean_within(std::size_t dr_index, double window, double end_time) const {
    if (sample_times.empty()) return 0.0;
    if (end_time < 0.0) end_time = sample_times.back();
    double start_time = end_time - window;
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] > start_time && sample_times[i] <= end_time) {
            sum += within_counts[i][dr_index];
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

int RunMetrics::targets_found_at(double t) const {
    int value = 0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] <= t + 1e-9) value = targets_found[i];
        else break;
    }
    return value;
}

void write_metrics_csv(std::ostream& out, const RunMetrics& metrics, std::uint64_t repetition) {
    out << "rep,t,targets_found";
    for (double d_r : metrics.d_r_grid) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",within_%g", d_r);
        out << buf;
    }
    out << "\n";
    for (std::size_t i = 0; i < metrics.sample_times.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%llu,%.3f,%d", static_cast<unsigned long long>(repetition),
                      metrics.sample_times[i], metrics.targets_found[i]);
        out << buf;
        for (int c : metrics.within_counts[i]) out << ',' << c;
        out << "\n";
    }
}

}  // namespace swarmfence
