#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "cdrb/maze.hpp"
#include "cdrb/trajectory.hpp"

namespace cdrb {

struct SvgPath {
    Trajectory traj;
    std::string color = "#d62728";
    double width = 2.0;
};

/// Render the maze (bounds, obstacles, start regions, goal circles) with
/// trajectory polylines on top. y is flipped so world +y points up.
void write_maze_svg(const MazeSpec& maze, std::span<const SvgPath> paths,
                    const std::filesystem::path& path, double scale = 64.0);

}  // namespace cdrb
