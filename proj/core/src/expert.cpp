#include "cdrb/expert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "cdrb/textio.hpp"

namespace cdrb {

namespace {

struct QueueEntry {
    double f;
    int x, y;
    int id;
};

// Min-heap order on (f, x, y); deterministic expansion order.
struct QueueCmp {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.x != b.x) return a.x > b.x;
        return a.y > b.y;
    }
};

}  // namespace

std::vector<Vec2> astar_path(const OccupancyGrid& grid, Vec2 start, Vec2 goal) {
    const auto [sx, sy] = grid.cell_of(start);
    const auto [gx, gy] = grid.cell_of(goal);
    if (!grid.is_free(sx, sy)) throw PlanningError("astar: start cell blocked");
    if (!grid.is_free(gx, gy)) throw PlanningError("astar: goal cell blocked");
    if (sx == gx && sy == gy) return {grid.cell_center(sx, sy)};

    const double cw = grid.cell_w();
    const double ch = grid.cell_h();
    const auto heuristic = [&](int x, int y) {
        return std::hypot((gx - x) * cw, (gy - y) * ch);
    };

    const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueCmp> open;

    const int start_id = sy * grid.nx + sx;
    const int goal_id = gy * grid.nx + gx;
    g[start_id] = 0.0;
    open.push({heuristic(sx, sy), sx, sy, start_id});

    static constexpr int DX[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int DY[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    while (!open.empty()) {
        const QueueEntry e = open.top();
        open.pop();
        if (closed[e.id]) continue;
        closed[e.id] = 1;
        if (e.id == goal_id) break;

        for (int k = 0; k < 8; ++k) {
            const int nx = e.x + DX[k];
            const int ny = e.y + DY[k];
            if (!grid.in_grid(nx, ny) || !grid.is_free(nx, ny)) continue;
            if (DX[k] != 0 && DY[k] != 0 &&
                (!grid.is_free(e.x + DX[k], e.y) || !grid.is_free(e.x, e.y + DY[k])))
                continue;  // no corner cutting
            const int nid = ny * grid.nx + nx;
            if (closed[nid]) continue;
            const double cost = std::hypot(DX[k] * cw, DY[k] * ch);
            const double cand = g[e.id] + cost;
            if (cand < g[nid]) {
                g[nid] = cand;
                parent[nid] = e.id;
                open.push({cand + heuristic(nx, ny), nx, ny, nid});
            }
        }
    }

    if (!closed[goal_id]) throw PlanningError("astar: no path between start and goal");

    std::vector<Vec2> path;
    for (int id = goal_id; id != -1; id = parent[id])
        path.push_back(grid.cell_center(id % grid.nx, id / grid.nx));
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Vec2> shortcut_path(const MazeSpec& maze, const std::vector<Vec2>& path) {
    if (path.size() <= 2) return path;
    std::vector<Vec2> out;
    out.push_back(path.front());
    std::size_t i = 0;
    while (i + 1 < path.size()) {
        std::size_t best = i + 1;  // always advance even if no segment checks out
        for (std::size_t j = path.size() - 1; j > i + 1; --j) {
            if (segment_feasible(path[i], path[j], maze)) {
                best = j;
                break;
            }
        }
        out.push_back(path[best]);
        i = best;
    }
    return out;
}

std::vector<Vec2> resample_path(const std::vector<Vec2>& path, double spacing) {
    if (spacing <= 0.0) throw ConfigError("resample_path: spacing must be positive");
    if (path.size() < 2) return path;
    std::vector<Vec2> out;
    out.push_back(path.front());
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Vec2 a = path[i];
        const Vec2 b = path[i + 1];
        const double len = (b - a).norm();
        if (len == 0.0) continue;
        const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int k = 1; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
        }
    }
    return out;
}

DemoResult expert_demo_for(const MazeSpec& maze, const MazeState& start,
                           const GoalRegion& goal, const ExpertParams& params) {
    const MazeSpec inflated = maze.inflated(params.inflate_margin);
    const OccupancyGrid grid = build_occupancy_grid(inflated, params.grid_resolution);

    std::vector<Vec2> waypoints;
    try {
        std::vector<Vec2> path = astar_path(grid, start.pos, goal.center);
        path.insert(path.begin(), start.pos);
        path.push_back(goal.center);
        path = shortcut_path(inflated, path);
        waypoints = resample_path(path, params.waypoint_spacing);
    } catch (const PlanningError&) {
        return {};  // sampled endpoints unplannable at this inflation; caller retries
    }

    const ExecutionResult run = follow_waypoints(maze, start, waypoints, params.gains,
                                                 goal.center, goal.radius, params.tracking);
    DemoResult res;
    res.traj = run.executed;
    res.success = run.success;
    res.collisions = run.collisions;
    return res;
}

DemoResult generate_demo(const MazeSpec& maze, Rng& rng, const ExpertParams& params) {
    const MazeState start = sample_start(maze, rng);
    const GoalRegion& goal = maze.goals[rng.uniform_index(maze.goals.size())];
    return expert_demo_for(maze, start, goal, params);
}

DemoDataset generate_dataset(const MazeSpec& maze, uint64_t seed, const DatasetParams& params) {
    if (params.num_demos <= 0) throw ConfigError("generate_dataset: num_demos must be positive");
    if (params.horizon < 1) throw ConfigError("generate_dataset: horizon must be at least 1");

    const Rng root(seed);
    const long long cap =
        static_cast<long long>(params.num_demos) * params.max_attempts_factor;

    DemoDataset ds;
    ds.maze_id = maze.id;
    ds.horizon = params.horizon;
    ds.has_actions = params.keep_actions;

    for (long long attempt = 0; attempt < cap &&
         ds.trajectories.size() < static_cast<std::size_t>(params.num_demos); ++attempt) {
        Rng demo_rng = root.stream("demo", static_cast<std::uint64_t>(attempt));
        DemoResult res = generate_demo(maze, demo_rng, params.expert);
        if (!res.success || res.collisions != 0) continue;

        Trajectory t = std::move(res.traj);
        while (t.states.size() < static_cast<std::size_t>(params.horizon) + 1) {
            t.states.push_back(t.states.back());  // hold terminal state
            t.actions.push_back({Vec2{0.0, 0.0}});
        }
        if (!params.keep_actions) t.actions.clear();

        Rng crop_rng = root.stream("crop", static_cast<std::uint64_t>(attempt));
        ds.trajectories.push_back(crop_trajectory(t, params.horizon, crop_rng));
    }

    if (ds.trajectories.size() < static_cast<std::size_t>(params.num_demos))
        throw PlanningError("generate_dataset: expert success rate too low (" +
                            std::to_string(ds.trajectories.size()) + "/" +
                            std::to_string(params.num_demos) + " demos after " +
                            std::to_string(cap) + " attempts)");

    std::vector<std::vector<double>> srows;
    srows.reserve(ds.trajectories.size() * (params.horizon + 1));
    std::vector<std::vector<double>> arows;
    for (const Trajectory& t : ds.trajectories) {
        for (const MazeState& s : t.states)
            srows.push_back({s.pos.x, s.pos.y, s.vel.x, s.vel.y});
        for (const Action& a : t.actions) arows.push_back({a.force.x, a.force.y});
    }
    ds.state_norm = Normalizer::fit(srows);
    if (params.keep_actions) ds.action_norm = Normalizer::fit(arows);
    return ds;
}

void save_dataset(const DemoDataset& ds, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "cdrb-dataset 1\n";
    out << "maze_id " << ds.maze_id << "\n";
    out << "horizon " << ds.horizon << "\n";
    out << "has_actions " << (ds.has_actions ? 1 : 0) << "\n";

    const auto write_norm = [&out](const char* key, const Normalizer& n) {
        out << key << " " << n.dim() << "\n";
        for (std::size_t i = 0; i < n.dim(); ++i)
            out << (i ? " " : "") << fmt_g17(n.lo[i]);
        if (n.dim()) out << "\n";
        for (std::size_t i = 0; i < n.dim(); ++i)
            out << (i ? " " : "") << fmt_g17(n.hi[i]);
        if (n.dim()) out << "\n";
    };
    write_norm("state_norm", ds.state_norm);
    write_norm("action_norm", ds.action_norm);

    out << "count " << ds.trajectories.size() << "\n";
    for (const Trajectory& t : ds.trajectories) {
        out << "traj " << t.states.size() << " " << t.actions.size() << "\n";
        for (const MazeState& s : t.states)
            out << fmt_g17(s.pos.x) << " " << fmt_g17(s.pos.y) << " "
                << fmt_g17(s.vel.x) << " " << fmt_g17(s.vel.y) << "\n";
        for (const Action& a : t.actions)
            out << fmt_g17(a.force.x) << " " << fmt_g17(a.force.y) << "\n";
    }

    std::ofstream f(path);
    if (!f) throw IoError("save_dataset: cannot open " + path.string());
    f << out.str();
    if (!f.good()) throw IoError("save_dataset: write failed for " + path.string());
}

DemoDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_dataset: cannot open " + path.string());
    TokenReader r(f, "dataset " + path.string());

    r.expect("cdrb-dataset");
    const long long version = r.integer();
    if (version != 1)
        throw IoError("load_dataset: unsupported version " + std::to_string(version));

    DemoDataset ds;
    r.expect("maze_id");
    ds.maze_id = r.token();
    r.expect("horizon");
    ds.horizon = static_cast<int>(r.integer());
    if (ds.horizon < 1) throw IoError("load_dataset: bad horizon");
    r.expect("has_actions");
    ds.has_actions = r.integer() != 0;

    const auto read_norm = [&r](const char* key) {
        r.expect(key);
        const long long d = r.integer();
        if (d < 0 || d > 64) throw IoError("load_dataset: bad normalizer size");
        Normalizer n;
        n.lo.resize(d);
        n.hi.resize(d);
        for (auto& v : n.lo) v = r.real();
        for (auto& v : n.hi) v = r.real();
        return n;
    };
    ds.state_norm = read_norm("state_norm");
    ds.action_norm = read_norm("action_norm");

    r.expect("count");
    const long long count = r.integer();
    if (count < 0) throw IoError("load_dataset: bad count");
    ds.trajectories.reserve(count);
    for (long long i = 0; i < count; ++i) {
        r.expect("traj");
        const long long ns = r.integer();
        const long long na = r.integer();
        if (ns != ds.horizon + 1 || (na != 0 && na != ds.horizon))
            throw IoError("load_dataset: trajectory size mismatch");
        Trajectory t;
        t.states.resize(ns);
        for (auto& s : t.states) {
            s.pos.x = r.real();
            s.pos.y = r.real();
            s.vel.x = r.real();
            s.vel.y = r.real();
        }
        t.actions.resize(na);
        for (auto& a : t.actions) {
            a.force.x = r.real();
            a.force.y = r.real();
        }
        ds.trajectories.push_back(std::move(t));
    }
    return ds;
}

}  // namespace cdrb
