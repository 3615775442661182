#include "swarmfence/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace swarmfence {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Chemotaxis: return "Chemotaxis";
        case Mode::Bounded: return "Bounded";
        case Mode::Unbounded: return "Unbounded";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "Chemotaxis") return Mode::Chemotaxis;
    if (s == "Bounded") return Mode::Bounded;
    if (s == "Unbounded") return Mode::Unbounded;
    throw ConfigError("mode: unknown value '" + s + "'");
}

SimConfig validate_config(SimConfig raw) {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    check(raw.dt > 0.0, "dt: must be > 0");
    check(raw.v_r > 0.0, "v_r: must be > 0");
    check(raw.P_b > 0.0 && raw.P_b <= 1.0, "P_b: must be in (0, 1]");
    check(raw.M >= 1.0, "M: must be >= 1");
    check(raw.D >= 1.0, "D: must be >= 1");
    check(raw.P_b * raw.M <= 1.0, "P_b*M: turn probability must remain a probability (<= 1)");
    check(raw.d_c > 0.0, "d_c: must be > 0");
    check(raw.n >= 1, "n: must be >= 1");
    check(raw.v_n >= 0.0, "v_n: must be >= 0");
    check(raw.d_n >= 0.0, "d_n: must be >= 0");
    check(raw.t_max > 0.0, "t_max: must be > 0");
    check(raw.swarm_size >= 1, "swarm_size: must be >= 1");
    check(raw.robot_radius > 0.0, "robot_radius: must be > 0");
    check(raw.turn_rate >= 0.0, "turn_rate: must be >= 0");
    check(raw.repetitions >= 1, "repetitions: must be >= 1");

    if (raw.dt > 0.0) {
        double ratio = raw.sense_period / raw.dt;
        double rounded = std::round(ratio);
        if (raw.sense_period <= 0.0 || rounded < 1.0 ||
            std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
            errors.push_back("sense_period: must be a positive integer multiple of dt");
        } else {
            raw.steps_per_sense = static_cast<int>(rounded);
        }
    }

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return raw;
}

void validate_arena(const ArenaSpec& arena) {
    if (arena.shape == ArenaSpec::Shape::Circle) {
        if (arena.radius <= 0.0) throw ConfigError("arena.radius: must be > 0");
    } else {
        if (arena.width <= 0.0 || arena.height <= 0.0)
            throw ConfigError("arena.width/height: must be > 0");
    }
    if (!arena.origin.finite()) throw ConfigError("arena.origin: must be finite");
}

namespace {

void reject_unknown_keys(const json& obj, const std::vector<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

ArenaSpec arena_from_json(const json& a) {
    ArenaSpec arena;
    if (!a.contains("shape")) throw ConfigError("arena.shape: missing");
    std::string shape = a.at("shape").get<std::string>();
    if (shape == "circle") {
        reject_unknown_keys(a, {"shape", "radius", "origin", "walled"}, "arena");
        arena.shape = ArenaSpec::Shape::Circle;
        arena.radius = a.at("radius").get<double>();
    } else if (shape == "rectangle") {
        reject_unknown_keys(a, {"shape", "width", "height", "origin", "walled"}, "arena");
        arena.shape = ArenaSpec::Shape::Rectangle;
        arena.width = a.at("width").get<double>();
        arena.height = a.at("height").get<double>();
    } else {
        throw ConfigError("arena.shape: must be 'circle' or 'rectangle'");
    }
    if (a.contains("origin")) {
        auto o = a.at("origin");
        arena.origin = {o.at(0).get<double>(), o.at(1).get<double>()};
    }
    if (a.contains("walled")) arena.walled = a.at("walled").get<bool>();
    validate_arena(arena);
    return arena;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    static const std::vector<std::string> known = {
        "dt", "v_r", "P_b", "M", "D", "d_c", "n", "sense_period", "v_n", "d_n",
        "t_max", "swarm_size", "robot_radius", "turn_rate", "mode", "seed", "repetitions",
        "arena"};
    reject_unknown_keys(j, known, "config");

    RunConfig cfg;
    SimConfig& s = cfg.sim;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("dt", s.dt);
    get("v_r", s.v_r);
    get("P_b", s.P_b);
    get("M", s.M);
    get("D", s.D);
    get("d_c", s.d_c);
    get("n", s.n);
    get("sense_period", s.sense_period);
    get("v_n", s.v_n);
    get("d_n", s.d_n);
    get("t_max", s.t_max);
    get("swarm_size", s.swarm_size);
    get("robot_radius", s.robot_radius);
    get("turn_rate", s.turn_rate);
    get("seed", s.seed);
    get("repetitions", s.repetitions);
    if (j.contains("mode")) s.mode = mode_from_string(j.at("mode").get<std::string>());
    cfg.sim = validate_config(s);

    if (j.contains("arena")) cfg.arena = arena_from_json(j.at("arena"));
    else validate_arena(cfg.arena);
    return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    ordered_json j;
    j["dt"] = s.dt;
    j["v_r"] = s.v_r;
    j["P_b"] = s.P_b;
    j["M"] = s.M;
    j["D"] = s.D;
    j["d_c"] = s.d_c;
    j["n"] = s.n;
    j["sense_period"] = s.sense_period;
    j["v_n"] = s.v_n;
    j["d_n"] = s.d_n;
    j["t_max"] = s.t_max;
    j["swarm_size"] = s.swarm_size;
    j["robot_radius"] = s.robot_radius;
    j["turn_rate"] = s.turn_rate;
    j["mode"] = to_string(s.mode);
    j["seed"] = s.seed;
    j["repetitions"] = s.repetitions;
    ordered_json a;
    if (cfg.arena.shape == ArenaSpec::Shape::Circle) {
        a["shape"] = "circle";
        a["radius"] = cfg.arena.radius;
    } else {
        a["shape"] = "rectangle";
        a["width"] = cfg.arena.width;
        a["height"] = cfg.arena.height;
    }
    a["origin"] = {cfg.arena.origin.x, cfg.arena.origin.y};
    a["walled"] = cfg.arena.walled;
    j["arena"] = a;
    return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace swarmfence
