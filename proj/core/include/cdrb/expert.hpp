#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdrb/control.hpp"
#include "cdrb/maze.hpp"
#include "cdrb/normalize.hpp"
#include "cdrb/occupancy.hpp"
#include "cdrb/rng.hpp"
#include "cdrb/trajectory.hpp"

namespace cdrb {

/// Grid path from A* over an occupancy grid, 8-connected with unit/sqrt(2)
/// edge costs. Diagonal steps require both adjacent cardinal cells free
/// (no corner cutting). Ties on f break on (f, x, y) so the result is
/// deterministic. Returns cell centers from start cell to goal cell.
/// Throws PlanningError if start/goal cells are blocked or no path exists.
std::vector<Vec2> astar_path(const OccupancyGrid& grid, Vec2 start, Vec2 goal);

/// Greedy line-of-sight smoothing: from each kept waypoint, jump to the
/// farthest later waypoint whose connecting segment stays feasible in `maze`.
/// First and last points are always kept.
std::vector<Vec2> shortcut_path(const MazeSpec& maze, const std::vector<Vec2>& path);

/// Resample a polyline at (approximately) uniform arc-length spacing.
/// Keeps the exact endpoints; every interior vertex of the input polyline
/// is preserved as a sample so corners are never cut.
std::vector<Vec2> resample_path(const std::vector<Vec2>& path, double spacing);

struct ExpertParams {
    double inflate_margin = 0.12;  // obstacle inflation for planning
    int grid_resolution = 128;     // A* occupancy grid cells per axis
    double waypoint_spacing = 0.25;
    ControllerGains gains{};       // PD tracking gains
    TrackingParams tracking{};     // capture radius / step budgets
};

struct DemoResult {
    Trajectory traj;   // executed states + applied actions
    bool success = false;
    int collisions = 0;
};

/// Deterministic expert rollout for fixed endpoints: plan on the inflated
/// maze, track waypoints with the PD controller in the real maze, return
/// the executed trajectory.
DemoResult expert_demo_for(const MazeSpec& maze, const MazeState& start,
                           const GoalRegion& goal, const ExpertParams& params = {});

/// expert_demo_for with start and goal sampled from `rng`; dynamics stay
/// deterministic.
DemoResult generate_demo(const MazeSpec& maze, Rng& rng, const ExpertParams& params = {});

/// A fixed-horizon demonstration set in normalized units metadata.
struct DemoDataset {
    std::string maze_id;
    int horizon = 0;          // states per trajectory = horizon + 1
    bool has_actions = true;
    std::vector<Trajectory> trajectories;  // raw maze units
    Normalizer state_norm;    // per state dim (pos x, pos y, vel x, vel y)
    Normalizer action_norm;   // per action dim; empty when !has_actions

    std::size_t size() const { return trajectories.size(); }
};

struct DatasetParams {
    int num_demos = 200;
    int horizon = 48;
    bool keep_actions = true;
    ExpertParams expert{};
    int max_attempts_factor = 20;  // give up after num_demos * factor tries
};

/// Roll expert demos until `num_demos` successes, pad each to at least
/// horizon+1 states by repeating the terminal state (zero action), then
/// crop a uniform random window of exactly horizon+1 states.
/// Demo i uses rng streams derived from (root, "demo", i) so the set is
/// reproducible regardless of retry order.
DemoDataset generate_dataset(const MazeSpec& maze, uint64_t seed, const DatasetParams& params = {});

/// Text round-trip. Format: "cdrb-dataset 1" header, meta lines, normalizer
/// bounds, then one "traj" block per demo with %.17g numbers.
void save_dataset(const DemoDataset& ds, const std::filesystem::path& path);
DemoDataset load_dataset(const std::filesystem::path& path);

}  // namespace cdrb
