#include "doctest.h"

#include <cmath>

#include "swarmfence/controller.hpp"

using namespace swarmfence;

namespace {
const SignalModel kModel{};

RobotState make_robot(Vec2 pos, double heading, const SimConfig& cfg, std::uint64_t seed = 1) {
    RobotState r(pos, heading, cfg.n, RngStream(seed));
    r.turn_probability = cfg.P_b;
    return r;
}
}  // namespace

TEST_CASE("update_turn_probability truth table") {
    const double P_b = 0.0025, M = 10, D = 1000, thr = 81.76;
    // below threshold, falling signal
    CHECK(update_turn_probability(70, 75, thr, P_b, M, D) == doctest::Approx(0.025));
    // above threshold the history is ignored
    CHECK(update_turn_probability(90, 10, thr, P_b, M, D) == P_b);
    // below threshold, rising signal
    CHECK(update_turn_probability(75, 70, thr, P_b, M, 1000) ==
          doctest::Approx(0.0000025).epsilon(1e-12));
    // exact equality leaves the base probability
    CHECK(update_turn_probability(70, 70, thr, P_b, M, D) == P_b);
    // at the threshold chemotaxis is not active (strict <)
    CHECK(update_turn_probability(thr, 70, thr, P_b, M, D) == P_b);
}

TEST_CASE("sense_step commits the noiseless mean after a full window") {
    SimConfig cfg = validate_config(SimConfig{});
    SignalModel quiet = kModel;
    quiet.sigma_rel = 0.0;
    BehaviourMode chem = BehaviourMode::chemotaxis_mode(threshold_for_distance(quiet, cfg.d_c));
    RobotState robot = make_robot({7.0, 0.0}, 0.0, cfg);
    Vec2 nest{0.0, 0.0};
    for (long step = 0; step < 40; ++step) sense_step(robot, quiet, nest, chem, cfg, step);
    CHECK(robot.has_committed);
    CHECK(robot.intensity_curr == doctest::Approx(attenuated_intensity(quiet, 7.0)).epsilon(1e-12));
    CHECK(robot.turn_probability == cfg.P_b);  // first commit has no history
}

TEST_CASE("moving down-gradient below threshold raises the turn probability") {
    SimConfig cfg = validate_config(SimConfig{});
    SignalModel quiet = kModel;
    quiet.sigma_rel = 0.0;
    BehaviourMode chem = BehaviourMode::chemotaxis_mode(threshold_for_distance(quiet, cfg.d_c));
    // robot beyond d_c moving radially outward
    RobotState robot = make_robot({12.0, 0.0}, 0.0, cfg);
    Vec2 nest{0.0, 0.0};
    for (long step = 0; step < 2 * cfg.steps_per_sense; ++step) {
        sense_step(robot, quiet, nest, chem, cfg, step);
        robot.position.x += cfg.v_r * cfg.dt;  // forced straight motion
    }
    CHECK(robot.turn_probability == doctest::Approx(cfg.P_b * cfg.M));

    // and radially inward: turns are suppressed
    RobotState inward = make_robot({14.0, 0.0}, 0.0, cfg);
    for (long step = 0; step < 2 * cfg.steps_per_sense; ++step) {
        sense_step(inward, quiet, nest, chem, cfg, step);
        inward.position.x -= cfg.v_r * cfg.dt;
    }
    CHECK(inward.turn_probability == doctest::Approx(cfg.P_b / cfg.D));
}

TEST_CASE("pure random walk ignores the signal") {
    SimConfig cfg = validate_config(SimConfig{});
    BehaviourMode prw = BehaviourMode::pure_random_walk();
    RobotState robot = make_robot({50.0, 0.0}, 0.0, cfg);
    Vec2 nest{0.0, 0.0};
    for (long step = 0; step < 200; ++step) {
        sense_step(robot, kModel, nest, prw, cfg, step);
        robot.position.x -= cfg.v_r * cfg.dt;
        CHECK(robot.turn_probability == cfg.P_b);
    }
}

TEST_CASE("motion_step kinematics") {
    SimConfig cfg = validate_config(SimConfig{});
    SUBCASE("P_t=0 is pure straight motion") {
        RobotState robot = make_robot({0, 0}, 0.0, cfg);
        robot.turn_probability = 0.0;
        for (int i = 0; i < 100; ++i) motion_step(robot, cfg.v_r, cfg.dt);
        CHECK(robot.position.x == doctest::Approx(100 * 0.015125).epsilon(1e-12));
        CHECK(robot.position.y == 0.0);
    }
    SUBCASE("P_t=1 turns every step with zero net displacement") {
        RobotState robot = make_robot({1.5, -2.0}, 0.3, cfg);
        robot.turn_probability = 1.0;
        for (int i = 0; i < 1000; ++i) motion_step(robot, cfg.v_r, cfg.dt);
        CHECK(robot.position.x == 1.5);
        CHECK(robot.position.y == -2.0);
    }
    SUBCASE("turn frequency matches P_t") {
        RobotState robot = make_robot({0, 0}, 0.0, cfg, 404);
        robot.turn_probability = 0.0025;
        const int n = 1'000'000;
        int turns = 0;
        for (int i = 0; i < n; ++i) {
            double h = robot.heading;
            motion_step(robot, cfg.v_r, cfg.dt);
            if (robot.heading != h) ++turns;
        }
        CHECK(std::abs(static_cast<double>(turns) / n - 0.0025) < 0.0002);
    }
}

TEST_CASE("run lengths between turns are geometric with mean 1/P_b") {
    SimConfig cfg = validate_config(SimConfig{});
    RobotState robot = make_robot({0, 0}, 0.0, cfg, 777);
    const double p = 0.02;  // shorter runs keep the sample size healthy
    robot.turn_probability = p;
    const int steps = 200'000;
    std::vector<int> run_lengths;
    int current = 0;
    for (int i = 0; i < steps; ++i) {
        double h = robot.heading;
        motion_step(robot, cfg.v_r, cfg.dt);
        if (robot.heading != h) {
            run_lengths.push_back(current);
            current = 0;
        } else {
            ++current;
        }
    }
    double mean = 0;
    for (int r : run_lengths) mean += r;
    mean /= run_lengths.size();
    // geometric with success probability p counting straight steps before a
    // turn: mean (1-p)/p
    CHECK(mean == doctest::Approx((1 - p) / p).epsilon(0.05));

    // chi-square goodness of fit over equal-probability bins
    const int bins = 10;
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b)
        edges.push_back(std::log(1.0 - b / static_cast<double>(bins)) / std::log(1.0 - p));
    std::vector<int> observed(bins, 0);
    for (int r : run_lengths) {
        int b = 0;
        while (b < bins - 1 && r > edges[static_cast<std::size_t>(b)]) ++b;
        ++observed[static_cast<std::size_t>(b)];
    }
    double expected = static_cast<double>(run_lengths.size()) / bins;
    double chi2 = 0;
    for (int b = 0; b < bins; ++b) {
        // bin edges round to integers, so expected counts are only
        // approximately equal; recompute per bin from the geometric CDF
        double lo = b == 0 ? -1 : edges[static_cast<std::size_t>(b - 1)];
        double hi = b == bins - 1 ? 1e18 : edges[static_cast<std::size_t>(b)];
        auto cdf = [&](double k) { return 1.0 - std::pow(1.0 - p, std::floor(k) + 1.0); };
        double prob = (b == bins - 1 ? 1.0 : cdf(hi)) - (b == 0 ? 0.0 : cdf(lo));
        expected = prob * static_cast<double>(run_lengths.size());
        chi2 += (observed[static_cast<std::size_t>(b)] - expected) *
                (observed[static_cast<std::size_t>(b)] - expected) / expected;
    }
    CHECK(chi2 < 21.67);  // 99th percentile of chi-square with 9 dof
}
