#include "swarmfence/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace swarmfence {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Containment: return "Containment";
        case ExperimentKind::HeatmapSweep: return "HeatmapSweep";
        case ExperimentKind::StationarySearch: return "StationarySearch";
        case ExperimentKind::MovingSearch: return "MovingSearch";
        case ExperimentKind::Custom: return "Custom";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "Containment") return ExperimentKind::Containment;
    if (s == "HeatmapSweep") return ExperimentKind::HeatmapSweep;
    if (s == "StationarySearch") return ExperimentKind::StationarySearch;
    if (s == "MovingSearch") return ExperimentKind::MovingSearch;
    if (s == "Custom") return ExperimentKind::Custom;
    throw ConfigError("experiment kind: unknown value '" + s + "'");
}

Stats summarize(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("summarize: no samples");
    Stats stats;
    stats.count = static_cast<int>(samples.size());
    double sum = 0.0;
    for (double s : samples) sum += s;
    stats.mean = sum / stats.count;
    if (stats.count >= 2) {
        double ss = 0.0;
        for (double s : samples) ss += (s - stats.mean) * (s - stats.mean);
        double sd = std::sqrt(ss / (stats.count - 1));
        stats.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(stats.count));
    }
    return stats;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Mixes parameter values into the per-cell seed so a tuple's repetitions are
// reproducible in isolation and independent of grid enumeration order.
std::uint64_t cell_seed(std::uint64_t base, const std::map<std::string, std::string>& params) {
    std::uint64_t s = base;
    for (const auto& [k, v] : params) {
        for (char c : k) s = derive_seed(s, {static_cast<std::uint64_t>(c)});
        for (char c : v) s = derive_seed(s, {static_cast<std::uint64_t>(c)});
    }
    return s;
}

struct Cell {
    std::map<std::string, std::string> params;
    SimConfig config;
    ArenaSpec arena;
    RunOptions opts;
    // per-repetition metric rows: (extra params, metric name, value)
    std::function<std::vector<std::tuple<std::map<std::string, std::string>, std::string, double>>(
        const RunMetrics&)>
        extract;
};

SummaryTable run_cells(const std::vector<Cell>& cells, const SignalModel& signal,
                       std::uint64_t base_seed, int repetitions, int workers) {
    struct Job {
        std::size_t cell;
        int rep;
    };
    std::vector<Job> jobs;
    jobs.reserve(cells.size() * static_cast<std::size_t>(repetitions));
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (int r = 0; r < repetitions; ++r) jobs.push_back({c, r});

    using Rows = std::vector<std::tuple<std::map<std::string, std::string>, std::string, double>>;
    std::vector<Rows> results(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Cell& cell = cells[jobs[i].cell];
            std::uint64_t seed = cell_seed(base_seed, cell.params);
            RunMetrics metrics = run(cell.config, cell.arena, signal, seed,
                                     static_cast<std::uint64_t>(jobs[i].rep), cell.opts);
            results[i] = cell.extract(metrics);
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // deterministic reduce keyed by (tuple, metric), in job order
    std::vector<std::pair<std::map<std::string, std::string>, std::string>> order;
    std::map<std::string, std::vector<double>> samples;
    auto key_of = [](const std::map<std::string, std::string>& p, const std::string& m) {
        std::string key = m;
        for (const auto& [k, v] : p) key += "|" + k + "=" + v;
        return key;
    };
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Cell& cell = cells[jobs[i].cell];
        for (const auto& [extra, metric, value] : results[i]) {
            auto params = cell.params;
            params.insert(extra.begin(), extra.end());
            std::string key = key_of(params, metric);
            auto [it, inserted] = samples.try_emplace(key);
            if (inserted) order.emplace_back(params, metric);
            it->second.push_back(value);
        }
    }

    SummaryTable table;
    for (const auto& [params, metric] : order) {
        SummaryRow row;
        row.params = params;
        row.metric = metric;
        row.stats = summarize(samples.at(key_of(params, metric)));
        table.push_back(std::move(row));
    }
    return table;
}

constexpr double kMetricWindowSeconds = 500.0;

}  // namespace

SummaryTable run_containment(const ExperimentSpec& spec, int workers) {
    std::vector<Cell> cells;
    for (double d_c : spec.d_c_grid) {
        Cell cell;
        cell.params = {{"d_c", fmt(d_c)}, {"v_n", "0"}};
        SimConfig cfg = spec.base;
        cfg.d_c = d_c;
        cfg.v_n = 0.0;
        cfg.mode = Mode::Chemotaxis;
        cell.config = validate_config(cfg);
        cell.arena = ArenaSpec{};  // stationary nest at the origin, no wall
        cell.opts.d_r_grid = spec.d_r_grid;
        auto d_r_grid = spec.d_r_grid;
        cell.extract = [d_r_grid](const RunMetrics& m) {
            std::vector<std::tuple<std::map<std::string, std::string>, std::string, double>> rows;
            for (std::size_t i = 0; i < d_r_grid.size(); ++i) {
                std::map<std::string, std::string> extra{{"d_r", fmt(d_r_grid[i])}};
                rows.emplace_back(extra, "within_mean", m.mean_within(i, kMetricWindowSeconds));
                rows.emplace_back(extra, "within_endpoint",
                                  static_cast<double>(m.within_counts.back()[i]));
            }
            return rows;
        };
        cells.push_back(std::move(cell));
    }
    return run_cells(cells, spec.signal, spec.base_seed, spec.repetitions, workers);
}

SummaryTable run_heatmap(const ExperimentSpec& spec, int workers) {
    std::vector<Cell> cells;
    for (double v_n : spec.v_n_grid) {
        for (double M : spec.M_grid) {
            for (double D : spec.D_grid) {
                Cell cell;
                cell.params = {{"v_n", fmt(v_n)}, {"M", fmt(M)}, {"D", fmt(D)}};
                SimConfig cfg = spec.base;
                cfg.M = M;
                cfg.D = D;
                cfg.v_n = v_n;
                cfg.mode = Mode::Chemotaxis;
                if (v_n > 0.0) {
                    // the 100 m straight mission, with slack to finish it
                    double travel = 100.0 / (v_n * cfg.v_r);
                    cfg.t_max = std::max(cfg.t_max, travel + 100.0);
                    cell.opts.mission = straight_mission({0.0, 0.0}, 100.0);
                }
                cell.config = validate_config(cfg);
                cell.arena = ArenaSpec{};
                cell.opts.d_r_grid = spec.d_r_grid;
                auto d_r_grid = spec.d_r_grid;
                cell.extract = [d_r_grid](const RunMetrics& m) {
                    std::vector<std::tuple<std::map<std::string, std::string>, std::string, double>>
                        rows;
                    // averaging window ends when the mission completes (or at
                    // t_max for a stationary nest)
                    double end = m.nest_arrival_time;
                    for (std::size_t i = 0; i < d_r_grid.size(); ++i) {
                        rows.emplace_back(
                            std::map<std::string, std::string>{{"d_r", fmt(d_r_grid[i])}},
                            "within_mean", m.mean_within(i, kMetricWindowSeconds, end));
                    }
                    return rows;
                };
                cells.push_back(std::move(cell));
            }
        }
    }
    return run_cells(cells, spec.signal, spec.base_seed, spec.repetitions, workers);
}

namespace {

Cell make_search_cell(const ExperimentSpec& spec, std::map<std::string, std::string> params,
                      SimConfig cfg, ArenaSpec arena, std::optional<SweepPlan> mission) {
    Cell cell;
    cell.params = std::move(params);
    cell.config = validate_config(cfg);
    cell.arena = arena;
    cell.opts.target_count = 100;
    cell.opts.mission = std::move(mission);
    auto times = spec.metric_times;
    cell.extract = [times](const RunMetrics& m) {
        std::vector<std::tuple<std::map<std::string, std::string>, std::string, double>> rows;
        for (double t : times)
            rows.emplace_back(std::map<std::string, std::string>{{"t", fmt(t)}}, "targets_found",
                              static_cast<double>(m.targets_found_at(t)));
        return rows;
    };
    return cell;
}

}  // namespace

SummaryTable run_stationary_search(const ExperimentSpec& spec, int workers) {
    ArenaSpec arena;
    arena.shape = ArenaSpec::Shape::Circle;
    arena.radius = 14.0;
    arena.origin = {0.0, 0.0};

    double t_max = spec.metric_times.empty() ? spec.base.t_max
                                             : *std::max_element(spec.metric_times.begin(),
                                                                 spec.metric_times.end());
    std::vector<Cell> cells;
    for (Mode mode : spec.mode_grid) {
        if (mode == Mode::Chemotaxis) continue;
        SimConfig cfg = spec.base;
        cfg.mode = mode;
        cfg.v_n = 0.0;
        cfg.t_max = t_max;
        ArenaSpec a = arena;
        a.walled = mode == Mode::Bounded;
        cells.push_back(make_search_cell(spec, {{"variant", to_string(mode)}}, cfg, a, {}));
    }
    for (double d_c : spec.d_c_grid) {
        SimConfig cfg = spec.base;
        cfg.mode = Mode::Chemotaxis;
        cfg.d_c = d_c;
        cfg.v_n = 0.0;
        cfg.t_max = t_max;
        cells.push_back(make_search_cell(
            spec, {{"variant", "Chemotaxis"}, {"d_c", fmt(d_c)}}, cfg, arena, {}));
    }
    return run_cells(cells, spec.signal, spec.base_seed, spec.repetitions, workers);
}

SummaryTable run_moving_search(const ExperimentSpec& spec, int workers) {
    ArenaSpec arena;
    arena.shape = ArenaSpec::Shape::Rectangle;
    arena.width = 100.0;
    arena.height = 100.0;
    arena.origin = {0.0, 0.0};

    double t_max = spec.metric_times.empty() ? spec.base.t_max
                                             : *std::max_element(spec.metric_times.begin(),
                                                                 spec.metric_times.end());
    std::vector<Cell> cells;
    for (Mode mode : spec.mode_grid) {
        if (mode == Mode::Chemotaxis) continue;
        SimConfig cfg = spec.base;
        cfg.mode = mode;
        cfg.v_n = 0.0;
        cfg.t_max = t_max;
        ArenaSpec a = arena;
        a.walled = mode == Mode::Bounded;
        cells.push_back(make_search_cell(
            spec, {{"variant", to_string(mode)}, {"v_n", "0"}}, cfg, a, {}));
    }
    SweepPlan sweep = plan_sweep(arena, spec.lane_spacing);
    for (double v_n : spec.v_n_grid) {
        SimConfig cfg = spec.base;
        cfg.mode = Mode::Chemotaxis;
        cfg.v_n = v_n;
        cfg.t_max = t_max;
        cells.push_back(make_search_cell(
            spec, {{"variant", "Chemotaxis"}, {"v_n", fmt(v_n)}}, cfg, arena, sweep));
    }
    return run_cells(cells, spec.signal, spec.base_seed, spec.repetitions, workers);
}

SummaryTable run_experiment(const ExperimentSpec& spec, int workers) {
    switch (spec.kind) {
        case ExperimentKind::Containment: return run_containment(spec, workers);
        case ExperimentKind::HeatmapSweep: return run_heatmap(spec, workers);
        case ExperimentKind::StationarySearch: return run_stationary_search(spec, workers);
        case ExperimentKind::MovingSearch: return run_moving_search(spec, workers);
        case ExperimentKind::Custom: return run_containment(spec, workers);
    }
    throw std::logic_error("run_experiment: bad kind");
}

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ExperimentKind::Containment:
        case ExperimentKind::Custom:
            spec.d_c_grid = {6, 8, 10, 12, 14};
            spec.d_r_grid = {6, 8, 10, 12, 14, 16, 18, 20, 22};
            spec.base.M = 10;
            spec.base.D = 1000;
            spec.base.t_max = 1500;
            break;
        case ExperimentKind::HeatmapSweep:
            spec.M_grid = {1, 2, 6, 10, 20, 50};
            spec.D_grid = {1, 10, 100, 1000};
            spec.v_n_grid = {0, 0.125, 0.25};
            spec.d_r_grid = {10, 16};
            spec.base.d_c = 10;
            spec.base.t_max = 1500;
            break;
        case ExperimentKind::StationarySearch:
            spec.d_c_grid = {10, 12, 14};
            spec.mode_grid = {Mode::Bounded, Mode::Unbounded};
            spec.metric_times = {200, 400, 600, 800, 1000};
            spec.base.M = 10;
            spec.base.D = 1000;
            break;
        case ExperimentKind::MovingSearch:
            spec.v_n_grid = {0.1, 0.125, 0.167, 0.25};
            spec.mode_grid = {Mode::Bounded, Mode::Unbounded};
            spec.metric_times = {2000, 4000, 6000, 8000, 10000};
            spec.base.d_c = 12;
            spec.base.M = 6;
            spec.base.D = 1000;
            break;
    }
    return spec;
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment spec: JSON parse error: ") + e.what());
    }
    if (!j.contains("kind")) throw ConfigError("experiment spec: missing 'kind'");
    ExperimentSpec spec = default_spec(experiment_kind_from_string(j.at("kind").get<std::string>()));

    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "kind") continue;
        else if (k == "repetitions") spec.repetitions = it->get<int>();
        else if (k == "base_seed") spec.base_seed = it->get<std::uint64_t>();
        else if (k == "lane_spacing") spec.lane_spacing = it->get<double>();
        else if (k == "d_c_grid") spec.d_c_grid = it->get<std::vector<double>>();
        else if (k == "M_grid") spec.M_grid = it->get<std::vector<double>>();
        else if (k == "D_grid") spec.D_grid = it->get<std::vector<double>>();
        else if (k == "v_n_grid") spec.v_n_grid = it->get<std::vector<double>>();
        else if (k == "d_r_grid") spec.d_r_grid = it->get<std::vector<double>>();
        else if (k == "metric_times") spec.metric_times = it->get<std::vector<double>>();
        else if (k == "mode_grid") {
            spec.mode_grid.clear();
            for (const auto& m : *it) spec.mode_grid.push_back(mode_from_string(m.get<std::string>()));
        } else if (k == "signal") {
            for (auto s = it->begin(); s != it->end(); ++s) {
                if (s.key() == "A0") spec.signal.A0 = s->get<double>();
                else if (s.key() == "alpha") spec.signal.alpha = s->get<double>();
                else if (s.key() == "Ae") spec.signal.Ae = s->get<double>();
                else if (s.key() == "sigma_rel") spec.signal.sigma_rel = s->get<double>();
                else throw ConfigError("experiment spec: unknown signal key '" + s.key() + "'");
            }
        } else if (k == "config") {
            // partial SimConfig overrides, same field names as the run config
            for (auto c = it->begin(); c != it->end(); ++c) {
                const std::string& ck = c.key();
                SimConfig& b = spec.base;
                if (ck == "dt") b.dt = c->get<double>();
                else if (ck == "v_r") b.v_r = c->get<double>();
                else if (ck == "P_b") b.P_b = c->get<double>();
                else if (ck == "M") b.M = c->get<double>();
                else if (ck == "D") b.D = c->get<double>();
                else if (ck == "d_c") b.d_c = c->get<double>();
                else if (ck == "n") b.n = c->get<int>();
                else if (ck == "sense_period") b.sense_period = c->get<double>();
                else if (ck == "d_n") b.d_n = c->get<double>();
                else if (ck == "t_max") b.t_max = c->get<double>();
                else if (ck == "swarm_size") b.swarm_size = c->get<int>();
                else if (ck == "robot_radius") b.robot_radius = c->get<double>();
                else if (ck == "turn_rate") b.turn_rate = c->get<double>();
                else throw ConfigError("experiment spec: unknown config key '" + ck + "'");
            }
        } else {
            throw ConfigError("experiment spec: unknown key '" + k + "'");
        }
    }
    if (spec.repetitions < 1) throw ConfigError("experiment spec: repetitions must be >= 1");
    spec.base = validate_config(spec.base);
    if (!spec.signal.valid()) throw ConfigError("experiment spec: invalid signal model");
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("experiment spec: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_spec(ss.str());
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
    std::vector<std::string> keys;
    for (const auto& row : table)
        for (const auto& [k, _] : row.params)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());

    for (const auto& k : keys) out << k << ',';
    out << "metric,mean,ci95,reps\n";
    for (const auto& row : table) {
        for (const auto& k : keys) {
            auto it = row.params.find(k);
            if (it != row.params.end()) out << it->second;
            out << ',';
        }
        char buf[96];
        if (row.stats.ci95)
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%d", row.metric.c_str(), row.stats.mean,
                          *row.stats.ci95, row.stats.count);
        else
            std::snprintf(buf, sizeof(buf), "%s,%.6f,,%d", row.metric.c_str(), row.stats.mean,
                          row.stats.count);
        out << buf << "\n";
    }
}

SummaryTable read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("summary csv: empty input");
    std::vector<std::string> headers;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) headers.push_back(col);
    }
    SummaryTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) fields.push_back(col);
        fields.resize(headers.size());
        SummaryRow row;
        for (std::size_t i = 0; i < headers.size(); ++i) {
            const std::string& h = headers[i];
            if (h == "metric") row.metric = fields[i];
            else if (h == "mean") row.stats.mean = std::stod(fields[i]);
            else if (h == "ci95") { if (!fields[i].empty()) row.stats.ci95 = std::stod(fields[i]); }
            else if (h == "reps") row.stats.count = std::stoi(fields[i]);
            else if (!fields[i].empty()) row.params[h] = fields[i];
        }
        table.push_back(std::move(row));
    }
    return table;
}

std::string format_table(const SummaryTable& table, const std::string& row_key,
                         const std::string& col_key, const std::string& metric) {
    auto numeric_less = [](const std::string& a, const std::string& b) {
        try {
            return std::stod(a) < std::stod(b);
        } catch (...) {
            return a < b;
        }
    };
    std::vector<std::string> rows, cols;
    for (const auto& r : table) {
        if (r.metric != metric) continue;
        auto ri = r.params.find(row_key);
        auto ci = r.params.find(col_key);
        if (ri != r.params.end() &&
            std::find(rows.begin(), rows.end(), ri->second) == rows.end())
            rows.push_back(ri->second);
        if (ci != r.params.end() &&
            std::find(cols.begin(), cols.end(), ci->second) == cols.end())
            cols.push_back(ci->second);
    }
    std::sort(rows.begin(), rows.end(), numeric_less);
    std::stable_sort(cols.begin(), cols.end(), numeric_less);

    std::ostringstream out;
    out << row_key << "\\" << col_key;
    for (const auto& c : cols) out << "\t" << c;
    out << "\n";
    for (const auto& rv : rows) {
        out << rv;
        for (const auto& cv : cols) {
            const SummaryRow* hit = nullptr;
            for (const auto& r : table) {
                if (r.metric != metric) continue;
                auto ri = r.params.find(row_key);
                auto ci = r.params.find(col_key);
                if (ri != r.params.end() && ri->second == rv &&
                    ((ci != r.params.end() && ci->second == cv) ||
                     (ci == r.params.end() && cols.size() == 1))) {
                    hit = &r;
                    break;
                }
            }
            if (!hit) {
                out << "\t-";
            } else {
                char buf[64];
                if (hit->stats.ci95)
                    std::snprintf(buf, sizeof(buf), "\t%.1f +- %.2f", hit->stats.mean,
                                  *hit->stats.ci95);
                else
                    std::snprintf(buf, sizeof(buf), "\t%.1f", hit->stats.mean);
                out << buf;
            }
        }
        out << "\n";
    }
    return out.str();
}

void run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir, int workers) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    SummaryTable table = run_experiment(spec, workers);

    std::ofstream csv(fs::path(out_dir) / "summary.csv");
    write_summary_csv(csv, table);

    ordered_json meta;
    meta["kind"] = to_string(spec.kind);
    meta["base_seed"] = spec.base_seed;
    meta["repetitions"] = spec.repetitions;
    meta["workers"] = workers;
    meta["ci_formula"] = "1.96*sample_std/sqrt(n)";
    meta["within_metric"] = "time-average over trailing 500 s (heatmap window ends at mission completion)";
    meta["signal"] = {{"A0", spec.signal.A0},
                      {"alpha", spec.signal.alpha},
                      {"Ae", spec.signal.Ae},
                      {"sigma_rel", spec.signal.sigma_rel}};
    RunConfig echo{spec.base, ArenaSpec{}};
    meta["base_config"] = ordered_json::parse(serialize_run_config(echo));
    // config hash: FNV-1a over the serialized base config
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : serialize_run_config(echo)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    meta["config_hash"] = h;
    std::ofstream mj(fs::path(out_dir) / "metadata.json");
    mj << meta.dump(2) << "\n";
}

}  // namespace swarmfence
