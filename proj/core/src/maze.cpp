#include "cdrb/maze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdrb/errors.hpp"
#include "cdrb/occupancy.hpp"

namespace cdrb {

namespace {

// Four walls boxing the center region, one passage of width `passage` in the
// middle of each side, goals near the four world corners.
MazeSpec cross_maze(std::string id, double passage) {
    MazeSpec m;
    m.id = std::move(id);
    m.bounds = {{0.0, 0.0}, {10.0, 10.0}};
    const double lo = 3.0, hi = 7.0;       // wall box
    const double th = 0.5;                 // wall thickness
    const double g0 = 5.0 - passage / 2.0; // passage edges
    const double g1 = 5.0 + passage / 2.0;

    // Horizontal walls span the full box width; vertical walls fill the gap
    // between them. Each side is split around its passage.
    m.obstacles = {
        {{lo, lo}, {g0, lo + th}},       {{g1, lo}, {hi, lo + th}},        // bottom
        {{lo, hi - th}, {g0, hi}},       {{g1, hi - th}, {hi, hi}},        // top
        {{lo, lo + th}, {lo + th, g0}},  {{lo, g1}, {lo + th, hi - th}},   // left
        {{hi - th, lo + th}, {hi, g0}},  {{hi - th, g1}, {hi, hi - th}},   // right
    };
    m.start_regions = {{{4.0, 4.0}, {6.0, 6.0}}};
    m.goals = {{{1.5, 1.5}, 0.5},
               {{8.5, 1.5}, 0.5},
               {{8.5, 8.5}, 0.5},
               {{1.5, 8.5}, 0.5}};
    return m;
}

bool parse_doubles(std::istringstream& in, double* out, int n) {
    for (int i = 0; i < n; ++i) {
        if (!(in >> out[i])) return false;
    }
    return true;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

MazeSpec MazeSpec::preset(std::string_view name) {
    if (name == "maze") return cross_maze("maze", 1.0);
    if (name == "maze_tight") return cross_maze("maze_tight", 0.5);
    if (name == "empty") {
        MazeSpec m;
        m.id = "empty";
        m.start_regions = {{{1.0, 1.0}, {9.0, 9.0}}};
        m.goals = {{{5.0, 5.0}, 0.5}};
        return m;
    }
    throw ConfigError("unknown maze preset: " + std::string(name));
}

MazeSpec MazeSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open maze file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

MazeSpec MazeSpec::parse(std::string_view text) {
    MazeSpec m;
    m.goals.clear();
    std::istringstream lines{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ConfigError("maze config line " + std::to_string(lineno) +
                              ": expected key = values");
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        std::istringstream vals(line.substr(eq + 1));

        double v[4];
        bool ok = true;
        if (key == "name") {
            ok = static_cast<bool>(vals >> m.id);
        } else if (key == "bounds") {
            ok = parse_doubles(vals, v, 4);
            if (ok) m.bounds = {{v[0], v[1]}, {v[2], v[3]}};
        } else if (key == "obstacle") {
            ok = parse_doubles(vals, v, 4);
            if (ok) m.obstacles.push_back({{v[0], v[1]}, {v[2], v[3]}});
        } else if (key == "start_region") {
            ok = parse_doubles(vals, v, 4);
            if (ok) m.start_regions.push_back({{v[0], v[1]}, {v[2], v[3]}});
        } else if (key == "goal") {
            ok = parse_doubles(vals, v, 3);
            if (ok) m.goals.push_back({{v[0], v[1]}, v[2]});
        } else if (key == "dt") {
            ok = parse_doubles(vals, v, 1);
            if (ok) m.dt = v[0];
        } else if (key == "decay") {
            ok = parse_doubles(vals, v, 1);
            if (ok) m.decay = v[0];
        } else if (key == "max_action") {
            ok = parse_doubles(vals, v, 1);
            if (ok) m.max_action = v[0];
        } else if (key == "skin") {
            ok = parse_doubles(vals, v, 1);
            if (ok) m.skin = v[0];
        } else {
            throw ConfigError("maze config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        }
        if (!ok)
            throw ConfigError("maze config line " + std::to_string(lineno) +
                              ": bad values for '" + key + "'");
    }
    return m;
}

std::string MazeSpec::to_config_text() const {
    std::ostringstream out;
    out << "name = " << id << "\n";
    out << "bounds = " << fmt(bounds.min.x) << " " << fmt(bounds.min.y) << " "
        << fmt(bounds.max.x) << " " << fmt(bounds.max.y) << "\n";
    out << "dt = " << fmt(dt) << "\n";
    out << "decay = " << fmt(decay) << "\n";
    out << "max_action = " << fmt(max_action) << "\n";
    out << "skin = " << fmt(skin) << "\n";
    for (const auto& o : obstacles)
        out << "obstacle = " << fmt(o.min.x) << " " << fmt(o.min.y) << " "
            << fmt(o.max.x) << " " << fmt(o.max.y) << "\n";
    for (const auto& r : start_regions)
        out << "start_region = " << fmt(r.min.x) << " " << fmt(r.min.y) << " "
            << fmt(r.max.x) << " " << fmt(r.max.y) << "\n";
    for (const auto& g : goals)
        out << "goal = " << fmt(g.center.x) << " " << fmt(g.center.y) << " "
            << fmt(g.radius) << "\n";
    return out.str();
}

void MazeSpec::validate(int grid_resolution) const {
    if (!bounds.valid()) throw ConfigError("maze '" + id + "': degenerate bounds");
    if (dt <= 0.0 || decay < 0.0 || decay > 1.0 || max_action <= 0.0 || skin <= 0.0)
        throw ConfigError("maze '" + id + "': bad dynamics parameters");
    for (const auto& o : obstacles) {
        if (!o.valid())
            throw ConfigError("maze '" + id + "': degenerate obstacle");
        if (o.min.x <= bounds.min.x || o.min.y <= bounds.min.y ||
            o.max.x >= bounds.max.x || o.max.y >= bounds.max.y)
            throw ConfigError("maze '" + id +
                              "': obstacle not strictly inside bounds");
    }
    if (start_regions.empty())
        throw ConfigError("maze '" + id + "': no start regions");
    if (goals.empty()) throw ConfigError("maze '" + id + "': no goals");
    for (const auto& g : goals) {
        if (g.radius <= 0.0)
            throw ConfigError("maze '" + id + "': non-positive goal radius");
        if (!point_feasible(g.center, *this))
            throw ConfigError("maze '" + id + "': goal center infeasible");
    }

    // Connectivity: every free cell centered in a start region must reach
    // every goal's cell.
    const OccupancyGrid grid = build_occupancy_grid(*this, grid_resolution);
    for (const auto& g : goals) {
        const auto [gx, gy] = grid.cell_of(g.center);
        if (!grid.is_free(gx, gy))
            throw ConfigError("maze '" + id + "': goal cell blocked at grid " +
                              std::to_string(grid_resolution));
        const auto reach = flood_fill(grid, gx, gy);
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                if (!grid.is_free(ix, iy)) continue;
                const Vec2 c = grid.cell_center(ix, iy);
                bool in_start = false;
                for (const auto& r : start_regions) in_start |= r.contains(c);
                if (in_start && !reach[static_cast<std::size_t>(iy) * grid.nx + ix])
                    throw ConfigError("maze '" + id +
                                      "': start region disconnected from goal");
            }
        }
    }
}

MazeSpec MazeSpec::inflated(double margin) const {
    MazeSpec m = *this;
    m.bounds.min += {margin, margin};
    m.bounds.max = m.bounds.max - Vec2{margin, margin};
    for (auto& o : m.obstacles) {
        o.min = o.min - Vec2{margin, margin};
        o.max += {margin, margin};
        // Inflation may push past the shrunken bounds; keep rectangles valid.
        o.min.x = std::max(o.min.x, m.bounds.min.x - margin);
        o.min.y = std::max(o.min.y, m.bounds.min.y - margin);
        o.max.x = std::min(o.max.x, m.bounds.max.x + margin);
        o.max.y = std::min(o.max.y, m.bounds.max.y + margin);
    }
    return m;
}

bool point_feasible(const Vec2& p, const MazeSpec& maze) {
    if (!maze.bounds.contains(p)) return false;
    for (const auto& o : maze.obstacles) {
        if (o.contains(p)) return false;
    }
    return true;
}

bool segment_feasible(const Vec2& a, const Vec2& b, const MazeSpec& maze) {
    if (!maze.bounds.contains(a) || !maze.bounds.contains(b)) return false;
    for (const auto& o : maze.obstacles) {
        if (segment_intersects_rect(a, b, o)) return false;
    }
    return true;
}

StepResult step_collide(const MazeState& s, const Action& a, const MazeSpec& maze) {
    if (!point_feasible(s.pos, maze))
        throw ConfigError("step: input state infeasible");

    const Vec2 force{std::clamp(a.force.x, -maze.max_action, maze.max_action),
                     std::clamp(a.force.y, -maze.max_action, maze.max_action)};
    Vec2 vel = s.vel * maze.decay + force * maze.dt;
    const Vec2 target = s.pos + vel * maze.dt;

    if (point_feasible(target, maze) && segment_feasible(s.pos, target, maze))
        return {{target, vel}, false};

    // Earliest contact along the motion segment, over obstacles and bounds.
    double t_hit = 1.0;
    bool have_hit = false;
    RectHit hit;
    std::vector<RectHit> hits;
    for (const auto& o : maze.obstacles) {
        if (segment_rect_entry(s.pos, target, o, hit)) {
            hits.push_back(hit);
            t_hit = std::min(t_hit, hit.t);
            have_hit = true;
        }
    }
    if (segment_box_exit(s.pos, target, maze.bounds, hit)) {
        hits.push_back(hit);
        t_hit = std::min(t_hit, hit.t);
        have_hit = true;
    }
    if (!have_hit) {
        // Numerically possible when the target grazes a boundary; stay put.
        return {{s.pos, {0.0, 0.0}}, true};
    }

    const Vec2 d = target - s.pos;
    const double len = d.norm();
    double back = len > 0.0 ? t_hit - maze.skin / len : 0.0;
    back = std::clamp(back, 0.0, 1.0);
    Vec2 pos = s.pos + d * back;

    bool block_x = false, block_y = false;
    for (const auto& h : hits) {
        if (h.t <= t_hit + 1e-12) {
            if (h.axis == 0) block_x = true;
            else if (h.axis == 1) block_y = true;
            else block_x = block_y = true;  // started on a boundary
        }
    }
    if (block_x) vel.x = 0.0;
    if (block_y) vel.y = 0.0;

    if (!point_feasible(pos, maze)) {
        pos = s.pos;
        vel = {0.0, 0.0};
    }
    return {{pos, vel}, true};
}

MazeState sample_start(const MazeSpec& maze, Rng& rng) {
    if (maze.start_regions.empty())
        throw ConfigError("sample_start: maze has no start regions");
    constexpr int kMaxAttempts = 10000;
    for (int i = 0; i < kMaxAttempts; ++i) {
        const auto& r = maze.start_regions[rng.uniform_index(maze.start_regions.size())];
        const Vec2 p{rng.uniform(r.min.x, r.max.x), rng.uniform(r.min.y, r.max.y)};
        if (point_feasible(p, maze)) return {p, {0.0, 0.0}};
    }
    throw PlanningError("sample_start: start region fully blocked");
}

Vec2 sample_goal(const MazeSpec& maze, Rng& rng) {
    if (maze.goals.empty()) throw ConfigError("sample_goal: maze has no goals");
    return maze.goals[rng.uniform_index(maze.goals.size())].center;
}

}  // namespace cdrb
