#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cdrb/errors.hpp"
#include "cdrb/maze.hpp"

using namespace cdrb;

TEST_CASE("presets validate and the tight variant narrows the passages") {
    const MazeSpec maze = MazeSpec::preset("maze");
    maze.validate();
    const MazeSpec tight = MazeSpec::preset("maze_tight");
    tight.validate();
    CHECK(maze.id == "maze");
    CHECK(tight.id == "maze_tight");
    CHECK(maze.obstacles.size() == tight.obstacles.size());

    // Identical wall layout except the passage width: total obstacle area is
    // strictly larger when the passages shrink.
    double area = 0.0, tight_area = 0.0;
    for (const auto& o : maze.obstacles) area += o.area();
    for (const auto& o : tight.obstacles) tight_area += o.area();
    CHECK(tight_area > area);

    // The center of each passage stays free in both.
    for (const Vec2 p : {Vec2{5.0, 3.25}, Vec2{5.0, 6.75}, Vec2{3.25, 5.0}, Vec2{6.75, 5.0}}) {
        CHECK(point_feasible(p, maze));
        CHECK(point_feasible(p, tight));
    }
    CHECK_THROWS_AS(MazeSpec::preset("nope"), ConfigError);
}

TEST_CASE("maze config text round-trips exactly") {
    const MazeSpec maze = MazeSpec::preset("maze_tight");
    const std::string text = maze.to_config_text();
    const MazeSpec back = MazeSpec::parse(text);
    CHECK(back.to_config_text() == text);
    CHECK(back.id == maze.id);
    CHECK(back.obstacles.size() == maze.obstacles.size());
    CHECK(back.goals.size() == maze.goals.size());
    CHECK(back.dt == maze.dt);
    CHECK(back.decay == maze.decay);
    CHECK(back.max_action == maze.max_action);
}

TEST_CASE("maze config parse errors carry line numbers") {
    CHECK_THROWS_AS(MazeSpec::parse("bounds = 0 0 10\n"), ConfigError);
    CHECK_THROWS_AS(MazeSpec::parse("nonsense = 1\n"), ConfigError);
    CHECK_THROWS_AS(MazeSpec::parse("bounds 0 0 10 10\n"), ConfigError);
}

TEST_CASE("validate rejects a maze whose goal is sealed off") {
    MazeSpec m = MazeSpec::preset("empty");
    // Box the goal in completely.
    m.obstacles = {{{4.0, 4.0}, {6.0, 4.5}},
                   {{4.0, 5.5}, {6.0, 6.0}},
                   {{4.0, 4.5}, {4.5, 5.5}},
                   {{5.5, 4.5}, {6.0, 5.5}}};
    CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("point feasibility treats obstacle boundaries as blocked") {
    const MazeSpec maze = MazeSpec::preset("maze");
    CHECK(point_feasible({5.0, 5.0}, maze));       // center room
    CHECK(point_feasible({1.5, 1.5}, maze));       // corner goal
    CHECK_FALSE(point_feasible({3.2, 4.0}, maze)); // inside the left wall
    CHECK_FALSE(point_feasible({3.0, 4.0}, maze)); // exactly on the wall face
    CHECK_FALSE(point_feasible({-0.1, 5.0}, maze));  // out of bounds
    CHECK(point_feasible({0.0, 5.0}, maze));         // world boundary is legal
}

TEST_CASE("segment feasibility matches wall layout") {
    const MazeSpec maze = MazeSpec::preset("maze");
    // Through the left wall below its passage: infeasible.
    CHECK_FALSE(segment_feasible({1.0, 4.0}, {5.0, 4.0}, maze));
    // Straight through the open passage center: feasible.
    CHECK(segment_feasible({1.0, 5.0}, {5.0, 5.0}, maze));
    // Within the center room: feasible.
    CHECK(segment_feasible({4.2, 4.2}, {5.8, 5.8}, maze));
    // Leaving the world: infeasible.
    CHECK_FALSE(segment_feasible({5.0, 5.0}, {5.0, 11.0}, maze));
}

TEST_CASE("free-space step follows the documented kinematics exactly") {
    const MazeSpec maze = MazeSpec::preset("maze");
    const MazeState s{{5.0, 5.0}, {0.3, -0.2}};
    const Action a{{0.5, 2.0}};  // y force exceeds max_action = 1

    const StepResult r = step_collide(s, a, maze);
    const double vx = maze.decay * 0.3 + maze.dt * 0.5;
    const double vy = maze.decay * -0.2 + maze.dt * 1.0;  // clamped force
    CHECK_FALSE(r.clamped);
    CHECK(r.state.vel.x == doctest::Approx(vx).epsilon(1e-12));
    CHECK(r.state.vel.y == doctest::Approx(vy).epsilon(1e-12));
    CHECK(r.state.pos.x == doctest::Approx(5.0 + maze.dt * vx).epsilon(1e-12));
    CHECK(r.state.pos.y == doctest::Approx(5.0 + maze.dt * vy).epsilon(1e-12));
}

TEST_CASE("collision clamps to contact and zeroes the blocked axis") {
    MazeSpec maze = MazeSpec::preset("empty");
    maze.obstacles = {{{5.0, 0.0}, {6.0, 10.0}}};
    maze.start_regions = {{{1.0, 1.0}, {4.0, 9.0}}};

    // Ram the wall from the left with a large velocity.
    MazeState s{{4.9, 5.0}, {5.0, 0.0}};
    const StepResult r = step_collide(s, {{1.0, 0.0}}, maze);
    CHECK(r.clamped);
    CHECK(r.state.pos.x < 5.0);                    // stopped before the face
    CHECK(r.state.pos.x > 5.0 - 2.0 * maze.skin);  // but only by the skin
    CHECK(r.state.vel.x == 0.0);                   // blocked axis zeroed
    CHECK(point_feasible(r.state.pos, maze));

    // The world boundary clamps the same way.
    MazeState edge{{0.05, 5.0}, {-3.0, 0.4}};
    const StepResult r2 = step_collide(edge, {{-1.0, 0.0}}, maze);
    CHECK(r2.clamped);
    CHECK(r2.state.pos.x >= 0.0);
    CHECK(r2.state.vel.x == 0.0);
    CHECK(r2.state.vel.y != 0.0);  // free axis keeps its velocity
    CHECK(point_feasible(r2.state.pos, maze));
}

TEST_CASE("step rejects infeasible input states") {
    const MazeSpec maze = MazeSpec::preset("maze");
    CHECK_THROWS_AS(step_collide({{3.2, 4.0}, {0.0, 0.0}}, {{0.0, 0.0}}, maze),
                    ConfigError);
}

TEST_CASE("a long rollout never leaves the feasible region") {
    const MazeSpec maze = MazeSpec::preset("maze_tight");
    Rng rng(7);
    MazeState s = sample_start(maze, rng);
    for (int i = 0; i < 2000; ++i) {
        const Action a{{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}};
        s = step(s, a, maze);
        REQUIRE(point_feasible(s.pos, maze));
    }
}

TEST_CASE("start samples come from the start regions with zero velocity") {
    const MazeSpec maze = MazeSpec::preset("maze");
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const MazeState s = sample_start(maze, rng);
        CHECK(maze.start_regions[0].contains(s.pos));
        CHECK(point_feasible(s.pos, maze));
        CHECK(s.vel == Vec2{0.0, 0.0});
    }
}

TEST_CASE("goal samples are goal centers, all of them eventually") {
    const MazeSpec maze = MazeSpec::preset("maze");
    Rng rng(4);
    std::vector<int> seen(maze.goals.size(), 0);
    for (int i = 0; i < 400; ++i) {
        const Vec2 g = sample_goal(maze, rng);
        bool found = false;
        for (std::size_t j = 0; j < maze.goals.size(); ++j) {
            if (g == maze.goals[j].center) {
                ++seen[j];
                found = true;
            }
        }
        CHECK(found);
    }
    for (int count : seen) CHECK(count > 0);
}

TEST_CASE("goal_reached uses a closed ball") {
    CHECK(goal_reached({{1.0, 1.0}, {0.0, 0.0}}, {1.0, 1.5}, 0.5));
    CHECK_FALSE(goal_reached({{1.0, 1.0}, {0.0, 0.0}}, {1.0, 1.51}, 0.5));
}

TEST_CASE("inflated grows obstacles and shrinks the bounds") {
    const MazeSpec maze = MazeSpec::preset("maze");
    const MazeSpec inf = maze.inflated(0.12);
    CHECK(inf.bounds.min.x == doctest::Approx(0.12));
    CHECK(inf.bounds.max.y == doctest::Approx(9.88));
    for (std::size_t i = 0; i < maze.obstacles.size(); ++i) {
        CHECK(inf.obstacles[i].min.x == doctest::Approx(maze.obstacles[i].min.x - 0.12));
        CHECK(inf.obstacles[i].max.y == doctest::Approx(maze.obstacles[i].max.y + 0.12));
    }
    // A point feasible in the real maze but hugging a wall becomes infeasible.
    CHECK(point_feasible({2.95, 4.0}, maze));
    CHECK_FALSE(point_feasible({2.95, 4.0}, inf));
}
