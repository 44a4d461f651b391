#include "cdrb/occupancy.hpp"

#include <algorithm>
#include <deque>

#include "cdrb/errors.hpp"

namespace cdrb {

std::pair<int, int> OccupancyGrid::cell_of(const Vec2& p) const {
    int ix = static_cast<int>((p.x - bounds.min.x) / cell_w());
    int iy = static_cast<int>((p.y - bounds.min.y) / cell_h());
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    return {ix, iy};
}

OccupancyGrid build_occupancy_grid(const MazeSpec& maze, int nx, int ny) {
    if (nx < 8 || ny < 8)
        throw ConfigError("build_occupancy_grid: resolution must be >= 8");
    OccupancyGrid g;
    g.nx = nx;
    g.ny = ny;
    g.bounds = maze.bounds;
    g.free.resize(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            g.free[static_cast<std::size_t>(iy) * nx + ix] =
                point_feasible(g.cell_center(ix, iy), maze) ? 1 : 0;
        }
    }
    return g;
}

std::vector<std::uint8_t> flood_fill(const OccupancyGrid& grid, int ix, int iy) {
    std::vector<std::uint8_t> reach(grid.free.size(), 0);
    if (!grid.in_grid(ix, iy) || !grid.is_free(ix, iy)) return reach;
    std::deque<std::pair<int, int>> q{{ix, iy}};
    reach[static_cast<std::size_t>(iy) * grid.nx + ix] = 1;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        const auto [cx, cy] = q.front();
        q.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int nx2 = cx + dx[k], ny2 = cy + dy[k];
            if (!grid.in_grid(nx2, ny2) || !grid.is_free(nx2, ny2)) continue;
            auto& r = reach[static_cast<std::size_t>(ny2) * grid.nx + nx2];
            if (!r) {
                r = 1;
                q.emplace_back(nx2, ny2);
            }
        }
    }
    return reach;
}

}  // namespace cdrb
