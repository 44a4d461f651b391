#pragma once

#include <filesystem>
#include <vector>

#include "cdrb/maze.hpp"
#include "cdrb/rng.hpp"

namespace cdrb {

/// Fixed-horizon state sequence, optionally with the actions taken between
/// consecutive states. |states| == horizon()+1; |actions| is horizon() or 0.
struct Trajectory {
    std::vector<MazeState> states;
    std::vector<Action> actions;

    int horizon() const { return static_cast<int>(states.size()) - 1; }
    bool has_actions() const { return !actions.empty(); }
};

/// Uniformly random contiguous window of exactly H+1 states (and H actions
/// when present). Throws ConfigError when the input is shorter than H+1.
Trajectory crop_trajectory(const Trajectory& traj, int H, Rng& rng);

/// Sum of consecutive position distances.
double path_length(const Trajectory& traj);

/// Text round-trip with exact (%.17g) numbers. Format: "cdrb-trajectory 1"
/// header, state count, action flag, then one line per state / action.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace cdrb
