#include <doctest.h>

#include "cdrb/errors.hpp"
#include "cdrb/occupancy.hpp"

using namespace cdrb;

TEST_CASE("grid cells are free exactly when their centers are feasible") {
    const MazeSpec maze = MazeSpec::preset("maze");
    const OccupancyGrid grid = build_occupancy_grid(maze, 32);
    REQUIRE(grid.nx == 32);
    REQUIRE(grid.ny == 32);
    REQUIRE(grid.free.size() == 32u * 32u);
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            REQUIRE(grid.is_free(ix, iy) == point_feasible(grid.cell_center(ix, iy), maze));
}

TEST_CASE("cell_of inverts cell_center and clamps outside points") {
    const MazeSpec maze = MazeSpec::preset("maze");
    const OccupancyGrid grid = build_occupancy_grid(maze, 16);
    for (int iy = 0; iy < grid.ny; iy += 3)
        for (int ix = 0; ix < grid.nx; ix += 3)
            CHECK(grid.cell_of(grid.cell_center(ix, iy)) == std::pair{ix, iy});
    CHECK(grid.cell_of({-5.0, -5.0}) == std::pair{0, 0});
    CHECK(grid.cell_of({50.0, 50.0}) == std::pair{15, 15});
}

TEST_CASE("flood fill reaches the goals from the center room") {
    const MazeSpec maze = MazeSpec::preset("maze_tight");
    const OccupancyGrid grid = build_occupancy_grid(maze, 64);
    const auto [sx, sy] = grid.cell_of({5.0, 5.0});
    const auto reach = flood_fill(grid, sx, sy);

    for (const GoalRegion& g : maze.goals) {
        const auto [gx, gy] = grid.cell_of(g.center);
        CHECK(reach[static_cast<std::size_t>(gy) * grid.nx + gx] != 0);
    }
    // A cell inside a wall is never reached.
    const auto [wx, wy] = grid.cell_of({3.25, 4.0});
    CHECK(reach[static_cast<std::size_t>(wy) * grid.nx + wx] == 0);
}

TEST_CASE("flood fill stays inside a sealed box") {
    MazeSpec m = MazeSpec::preset("empty");
    m.obstacles = {{{4.0, 4.0}, {6.0, 4.4}},
                   {{4.0, 5.6}, {6.0, 6.0}},
                   {{4.0, 4.4}, {4.4, 5.6}},
                   {{5.6, 4.4}, {6.0, 5.6}}};
    const OccupancyGrid grid = build_occupancy_grid(m, 64);
    const auto [ix, iy] = grid.cell_of({5.0, 5.0});
    REQUIRE(grid.is_free(ix, iy));
    const auto inside = flood_fill(grid, ix, iy);
    const auto [ox, oy] = grid.cell_of({1.0, 1.0});
    CHECK(inside[static_cast<std::size_t>(oy) * grid.nx + ox] == 0);
}

TEST_CASE("grid resolution is validated") {
    const MazeSpec maze = MazeSpec::preset("maze");
    CHECK_THROWS_AS(build_occupancy_grid(maze, 4), ConfigError);
}
