#pragma once

#include <vector>

#include "cdrb/maze.hpp"
#include "cdrb/trajectory.hpp"

namespace cdrb {

struct ControllerGains {
    double kp = 4.0;
    double kd = 1.0;
};

struct TrackingParams {
    double capture_radius = 0.15;  // waypoint reached within this distance
    int waypoint_budget = 10;      // env steps allowed per waypoint
    int step_cap = 800;
};

struct ExecutionResult {
    Trajectory executed;
    bool success = false;        // goal reached at the terminal check
    bool reached_goal_any = false;  // goal touched at any time (diagnostic)
    int collisions = 0;          // env clamp events
    int steps_used = 0;
};

/// PD force toward the planned position:
///   force = kp * (target.pos - cur.pos) - kd * cur.vel
/// clamped per-axis to the maze's max_action by step().
Action position_controller(const MazeState& s_cur, const MazeState& s_next_planned,
                           const ControllerGains& gains);

/// Drive the point mass through `waypoints` in order, advancing on capture
/// or when a waypoint's step budget runs out. Success is evaluated once,
/// when tracking ends (all waypoints consumed or step cap hit).
ExecutionResult follow_waypoints(const MazeSpec& maze, const MazeState& start,
                                 const std::vector<Vec2>& waypoints,
                                 const ControllerGains& gains, const Vec2& goal,
                                 double goal_radius, const TrackingParams& params);

/// Execute a planned trajectory: track the plan's positions from plan[0]
/// (which must be the true start state).
ExecutionResult execute_plan(const MazeSpec& maze, const Trajectory& plan,
                             const ControllerGains& gains, const Vec2& goal,
                             double goal_radius, const TrackingParams& params);

}  // namespace cdrb
