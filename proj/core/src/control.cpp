#include "cdrb/control.hpp"

#include "cdrb/errors.hpp"

namespace cdrb {

Action position_controller(const MazeState& s_cur, const MazeState& s_next_planned,
                           const ControllerGains& gains) {
    const Vec2 err = s_next_planned.pos - s_cur.pos;
    return {err * gains.kp - s_cur.vel * gains.kd};
}

ExecutionResult follow_waypoints(const MazeSpec& maze, const MazeState& start,
                                 const std::vector<Vec2>& waypoints,
                                 const ControllerGains& gains, const Vec2& goal,
                                 double goal_radius, const TrackingParams& params) {
    ExecutionResult res;
    res.executed.states.push_back(start);
    res.reached_goal_any = goal_reached(start, goal, goal_radius);

    MazeState s = start;
    int steps = 0;
    for (const Vec2& wp : waypoints) {
        int budget = params.waypoint_budget;
        while ((s.pos - wp).norm() > params.capture_radius && budget-- > 0 &&
               steps < params.step_cap) {
            const Action a = position_controller(s, {wp, {0.0, 0.0}}, gains);
            const StepResult r = step_collide(s, a, maze);
            s = r.state;
            ++steps;
            res.collisions += r.clamped ? 1 : 0;
            res.executed.states.push_back(s);
            res.executed.actions.push_back(a);
            res.reached_goal_any |= goal_reached(s, goal, goal_radius);
        }
        if (steps >= params.step_cap) break;
    }
    res.steps_used = steps;
    res.success = goal_reached(s, goal, goal_radius);
    return res;
}

ExecutionResult execute_plan(const MazeSpec& maze, const Trajectory& plan,
                             const ControllerGains& gains, const Vec2& goal,
                             double goal_radius, const TrackingParams& params) {
    if (plan.states.size() < 2)
        throw ConfigError("execute_plan: plan needs at least 2 states");
    std::vector<Vec2> waypoints;
    waypoints.reserve(plan.states.size() - 1);
    for (std::size_t i = 1; i < plan.states.size(); ++i)
        waypoints.push_back(plan.states[i].pos);
    return follow_waypoints(maze, plan.states[0], waypoints, gains, goal,
                            goal_radius, params);
}

}  // namespace cdrb
