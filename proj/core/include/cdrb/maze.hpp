#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cdrb/geometry.hpp"
#include "cdrb/rng.hpp"

namespace cdrb {

/// Point-mass state: position plus linear velocity per axis.
struct MazeState {
    Vec2 pos;
    Vec2 vel;
};

/// Per-axis force command. Clamping to the maze's max_action happens inside
/// step(); callers may pass unclamped values.
struct Action {
    Vec2 force;
};

struct GoalRegion {
    Vec2 center;
    double radius = 0.5;
};

/// World geometry and dynamics parameters for the 2D point-mass maze.
///
/// Loadable from a plain-text key/value config (see parse()); two presets
/// ship with the library: "maze" (four walls around the center with one
/// passage per side, four corner goals) and "maze_tight" (same layout,
/// passage width halved).
struct MazeSpec {
    std::string id = "maze";
    RectObstacle bounds{{0.0, 0.0}, {10.0, 10.0}};
    std::vector<RectObstacle> obstacles;
    std::vector<RectObstacle> start_regions;
    std::vector<GoalRegion> goals;
    double dt = 0.1;
    double decay = 0.95;       // velocity decay per step
    double max_action = 1.0;   // per-axis force clamp
    double skin = 1e-4;        // clearance kept from contact surfaces

    static MazeSpec preset(std::string_view name);
    static MazeSpec from_file(const std::string& path);
    static MazeSpec parse(std::string_view text);
    std::string to_config_text() const;

    /// Structural checks plus a grid flood-fill proving free space connects
    /// every start region to every goal. Throws ConfigError on violation.
    void validate(int grid_resolution = 64) const;

    /// Copy with obstacles grown and bounds shrunk by `margin`. Used for
    /// clearance-aware planning; never for feasibility metrics.
    MazeSpec inflated(double margin) const;
};

/// True iff p is inside the world bounds and strictly outside every obstacle
/// (obstacle boundaries count as infeasible).
bool point_feasible(const Vec2& p, const MazeSpec& maze);

/// True iff the closed segment ab stays in bounds and intersects no obstacle.
/// Exact segment/rectangle clipping, not sampling.
bool segment_feasible(const Vec2& a, const Vec2& b, const MazeSpec& maze);

struct StepResult {
    MazeState state;
    bool clamped = false;  // motion was cut short by an obstacle or bound
};

/// Semi-implicit Euler update with clamp-to-contact collision resolution:
///   vel' = decay*vel + dt*clamp(force);  pos' = pos + dt*vel'
/// If the motion segment hits an obstacle or leaves the bounds, the position
/// stops a skin margin before contact and the blocked velocity component is
/// zeroed. The returned state is always feasible.
/// Throws ConfigError if the input state is infeasible.
StepResult step_collide(const MazeState& s, const Action& a, const MazeSpec& maze);

inline MazeState step(const MazeState& s, const Action& a, const MazeSpec& maze) {
    return step_collide(s, a, maze).state;
}

/// Uniform draw from a start region (region chosen uniformly first), rejected
/// until feasible; zero velocity. Throws PlanningError after bounded attempts.
MazeState sample_start(const MazeSpec& maze, Rng& rng);

/// One goal-region center, chosen uniformly.
Vec2 sample_goal(const MazeSpec& maze, Rng& rng);

/// Closed-ball test on position.
inline bool goal_reached(const MazeState& s, const Vec2& goal, double radius) {
    return (s.pos - goal).norm() <= radius;
}

}  // namespace cdrb
