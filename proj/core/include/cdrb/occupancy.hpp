#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cdrb/maze.hpp"

namespace cdrb {

/// Boolean occupancy grid over the maze bounds; a cell is free iff its
/// center is feasible. Row-major, iy * nx + ix.
struct OccupancyGrid {
    int nx = 0;
    int ny = 0;
    RectObstacle bounds;
    std::vector<std::uint8_t> free;

    bool in_grid(int ix, int iy) const {
        return ix >= 0 && ix < nx && iy >= 0 && iy < ny;
    }
    bool is_free(int ix, int iy) const {
        return free[static_cast<std::size_t>(iy) * nx + ix] != 0;
    }
    double cell_w() const { return (bounds.max.x - bounds.min.x) / nx; }
    double cell_h() const { return (bounds.max.y - bounds.min.y) / ny; }
    Vec2 cell_center(int ix, int iy) const {
        return {bounds.min.x + (ix + 0.5) * cell_w(),
                bounds.min.y + (iy + 0.5) * cell_h()};
    }
    /// Cell containing p, clamped to the grid.
    std::pair<int, int> cell_of(const Vec2& p) const;
};

/// Rasterize the maze at `nx` by `ny` cells. Resolution must be at least 8
/// per axis (throws ConfigError otherwise).
OccupancyGrid build_occupancy_grid(const MazeSpec& maze, int nx, int ny);

inline OccupancyGrid build_occupancy_grid(const MazeSpec& maze, int resolution) {
    return build_occupancy_grid(maze, resolution, resolution);
}

/// 4-connected reachability from (ix, iy) over free cells. Returns one flag
/// per cell.
std::vector<std::uint8_t> flood_fill(const OccupancyGrid& grid, int ix, int iy);

}  // namespace cdrb
