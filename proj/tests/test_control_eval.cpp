#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cdrb/control.hpp"
#include "cdrb/errors.hpp"
#include "cdrb/eval.hpp"
#include "cdrb/expert.hpp"
#include "cdrb/maze.hpp"
#include "cdrb/planners.hpp"
#include "cdrb/rng.hpp"

using namespace cdrb;

namespace {

Trajectory line_plan(const Vec2& a, const Vec2& b, int n) {
    Trajectory t;
    for (int i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        t.states.push_back({a + u * (b - a), {0.0, 0.0}});
    }
    return t;
}

}  // namespace

TEST_CASE("position_controller implements the PD formula") {
    const ControllerGains g{3.0, 0.5};
    const MazeState cur{{1.0, 2.0}, {0.4, -0.2}};
    const MazeState tgt{{2.0, 1.5}, {9.9, 9.9}};  // target velocity is ignored

    const Action a = position_controller(cur, tgt, g);
    CHECK(a.force.x == doctest::Approx(3.0 * 1.0 - 0.5 * 0.4));
    CHECK(a.force.y == doctest::Approx(3.0 * -0.5 - 0.5 * -0.2));

    // Same state, zero velocity: no force.
    const Action z = position_controller({{1.0, 1.0}, {0.0, 0.0}}, {{1.0, 1.0}, {0.0, 0.0}}, g);
    CHECK(z.force.x == 0.0);
    CHECK(z.force.y == 0.0);
}

TEST_CASE("follow_waypoints crosses an empty maze and stops at the goal") {
    const MazeSpec maze = MazeSpec::preset("empty");
    const MazeState start{{2.0, 5.0}, {0.0, 0.0}};
    // Dense waypoints: each one reachable within its default step budget.
    std::vector<Vec2> wps;
    for (double x = 2.25; x <= 8.001; x += 0.25) wps.push_back({x, 5.0});

    const auto r = follow_waypoints(maze, start, wps, {}, {8.0, 5.0}, 0.5, {});
    CHECK(r.success);
    CHECK(r.reached_goal_any);
    CHECK(r.collisions == 0);
    CHECK(r.steps_used <= TrackingParams{}.step_cap);
    REQUIRE(!r.executed.states.empty());
    CHECK(r.executed.states.front().pos == start.pos);
    CHECK((r.executed.states.back().pos - Vec2{8.0, 5.0}).norm() <= 0.5);
    // One action per transition, all feasible states.
    CHECK(r.executed.actions.size() + 1 == r.executed.states.size());
    for (const auto& s : r.executed.states) CHECK(point_feasible(s.pos, maze));
}

TEST_CASE("execute_plan succeeds on a feasible plan and fails through a wall") {
    const MazeSpec maze = MazeSpec::preset("maze");

    // Feasible: straight run inside the center room.
    const auto ok =
        execute_plan(maze, line_plan({4.2, 5.0}, {5.8, 5.0}, 20), {}, {5.8, 5.0}, 0.3, {});
    CHECK(ok.success);
    CHECK(ok.collisions == 0);

    // Straight through the left wall well away from its passage: tracking is
    // blocked, so either the goal check fails or the wall was hit.
    const auto blocked =
        execute_plan(maze, line_plan({4.0, 3.8}, {1.0, 3.8}, 20), {}, {1.0, 3.8}, 0.3, {});
    CHECK((!blocked.success || blocked.collisions > 0));
    for (const auto& s : blocked.executed.states) CHECK(point_feasible(s.pos, maze));
}

TEST_CASE("execution is deterministic") {
    const MazeSpec maze = MazeSpec::preset("maze");
    const Trajectory plan = line_plan({4.5, 4.5}, {8.5, 1.5}, 30);
    const auto a = execute_plan(maze, plan, {}, {8.5, 1.5}, 0.5, {});
    const auto b = execute_plan(maze, plan, {}, {8.5, 1.5}, 0.5, {});
    CHECK(a.success == b.success);
    CHECK(a.steps_used == b.steps_used);
    REQUIRE(a.executed.states.size() == b.executed.states.size());
    for (std::size_t i = 0; i < a.executed.states.size(); ++i) {
        CHECK(a.executed.states[i].pos == b.executed.states[i].pos);
        CHECK(a.executed.states[i].vel == b.executed.states[i].vel);
    }
}

TEST_CASE("expert demo replayed as a plan executes cleanly") {
    const MazeSpec maze = MazeSpec::preset("maze");
    Rng rng(11);
    const auto demo = generate_demo(maze, rng, {});
    REQUIRE(demo.success);

    const auto& goal = demo.traj.states.back().pos;
    const auto r = execute_plan(maze, demo.traj, {}, goal, 0.5, {});
    CHECK(r.success);
    CHECK(r.collisions == 0);
}

TEST_CASE("plan_feasibility counts exact fractions") {
    const MazeSpec maze = MazeSpec::preset("maze");

    Trajectory t;
    t.states = {{{1.0, 1.0}, {}}, {{2.0, 1.0}, {}}, {{2.5, 1.0}, {}}};
    auto f = plan_feasibility(t, maze);
    CHECK(f.point_frac == 1.0);
    CHECK(f.segment_frac == 1.0);

    // Middle point inside the bottom-left wall segment: 2/3 points feasible,
    // both segments touch the wall.
    t.states[1].pos = {3.2, 3.2};
    f = plan_feasibility(t, maze);
    CHECK(f.point_frac == doctest::Approx(2.0 / 3.0));
    CHECK(f.segment_frac == 0.0);

    // Feasible endpoints left and right of a wall: points pass, the crossing
    // segment fails.
    t.states = {{{2.0, 3.8}, {}}, {{4.0, 3.8}, {}}};
    f = plan_feasibility(t, maze);
    CHECK(f.point_frac == 1.0);
    CHECK(f.segment_frac == 0.0);

    // Single state: segment fraction defined as 1.
    t.states = {{{1.0, 1.0}, {}}};
    f = plan_feasibility(t, maze);
    CHECK(f.point_frac == 1.0);
    CHECK(f.segment_frac == 1.0);
}

TEST_CASE("normalized_path_length is plain division and rejects bad references") {
    Trajectory t = line_plan({0.0, 0.0}, {3.0, 0.0}, 2);
    CHECK(normalized_path_length(t, 1.5) == doctest::Approx(2.0));
    CHECK(normalized_path_length(t, 3.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalized_path_length(t, 0.0), ConfigError);
    CHECK_THROWS_AS(normalized_path_length(t, -1.0), ConfigError);
}

TEST_CASE("make_episodes is deterministic and method-independent") {
    const MazeSpec maze = MazeSpec::preset("maze");
    EvalParams p;
    p.compute_reference = false;

    const auto a = make_episodes(maze, 42, 12, p);
    const auto b = make_episodes(maze, 42, 12, p);
    REQUIRE(a.size() == 12);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start.pos == b[i].start.pos);
        CHECK(a[i].goal.center == b[i].goal.center);
        CHECK(point_feasible(a[i].start.pos, maze));
    }

    const auto c = make_episodes(maze, 43, 12, p);
    bool any_diff = false;
    for (std::size_t i = 0; i < c.size(); ++i)
        any_diff |= !(a[i].start.pos == c[i].start.pos);
    CHECK(any_diff);
}

TEST_CASE("run_benchmark: oracle wins, blind planner matches direct computation") {
    const MazeSpec maze = MazeSpec::preset("maze");
    EvalParams p;
    p.episodes = 6;
    p.seeds = {3, 4};

    const std::vector<Planner> methods = {make_oracle_planner("oracle", maze),
                                          make_blind_planner("blind", 16)};
    const auto reports = run_benchmark(maze, methods, p);
    REQUIRE(reports.size() == 2);

    const EvalReport& oracle = reports[0];
    CHECK(oracle.method == "oracle");
    CHECK(oracle.n_episodes == 12);
    CHECK(oracle.success_rate == 1.0);
    CHECK(oracle.point_feasibility == 1.0);
    CHECK(oracle.segment_feasibility == 1.0);
    CHECK(oracle.normalized_length_count > 0);

    // The blind planner sits at the start, so it succeeds exactly when the
    // goal region already contains the start.
    const EvalReport& blind = reports[1];
    double expect = 0.0;
    int n = 0;
    for (auto seed : p.seeds)
        for (const auto& ep : make_episodes(maze, seed, p.episodes, p)) {
            expect += (ep.start.pos - ep.goal.center).norm() <= ep.goal.radius ? 1.0 : 0.0;
            ++n;
        }
    expect /= n;
    CHECK(blind.success_rate == doctest::Approx(expect));

    // Identical seeds give identical reports.
    const auto again = run_benchmark(maze, methods, p);
    CHECK(again[0].success_rate == oracle.success_rate);
    REQUIRE(again[0].episodes.size() == oracle.episodes.size());
    for (std::size_t i = 0; i < oracle.episodes.size(); ++i) {
        CHECK(again[0].episodes[i].success == oracle.episodes[i].success);
        CHECK(again[0].episodes[i].plan_length == oracle.episodes[i].plan_length);
    }
}

TEST_CASE("comparison_table lists every method with its headline numbers") {
    const MazeSpec maze = MazeSpec::preset("maze");
    EvalParams p;
    p.episodes = 4;
    p.seeds = {9};
    p.compute_reference = false;

    const auto reports =
        run_benchmark(maze, {make_blind_planner("blind", 8)}, p);
    const std::string table = comparison_table(reports);
    CHECK(table.find("method") != std::string::npos);
    CHECK(table.find("blind") != std::string::npos);
    CHECK(table.find("success") != std::string::npos);
}

TEST_CASE("save_report_json writes parseable aggregates and per-episode records") {
    const MazeSpec maze = MazeSpec::preset("maze");
    EvalParams p;
    p.episodes = 3;
    p.seeds = {5};
    p.compute_reference = false;

    const auto reports = run_benchmark(maze, {make_blind_planner("blind", 8)}, p);
    const auto path = std::filesystem::temp_directory_path() / "cdrb_eval_report.json";
    save_report_json(reports[0], path);

    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string json = buf.str();
    CHECK(json.find("\"method\"") != std::string::npos);
    CHECK(json.find("\"success_rate\"") != std::string::npos);
    CHECK(json.find("\"episodes\"") != std::string::npos);
    std::filesystem::remove(path);
}
