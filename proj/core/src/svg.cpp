#include "cdrb/svg.hpp"

#include <fstream>
#include <sstream>

#include "cdrb/errors.hpp"
#include "cdrb/textio.hpp"

namespace cdrb {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_maze_svg(const MazeSpec& maze, std::span<const SvgPath> paths,
                    const std::filesystem::path& path, double scale) {
    if (scale <= 0.0) throw ConfigError("write_maze_svg: scale must be positive");
    const double w = (maze.bounds.max.x - maze.bounds.min.x) * scale;
    const double h = (maze.bounds.max.y - maze.bounds.min.y) * scale;
    const auto X = [&](double x) { return (x - maze.bounds.min.x) * scale; };
    const auto Y = [&](double y) { return h - (y - maze.bounds.min.y) * scale; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
        << num(h) << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" fill=\"#ffffff\" stroke=\"#222222\" stroke-width=\"2\"/>\n";

    for (const RectObstacle& r : maze.start_regions)
        out << "<rect x=\"" << num(X(r.min.x)) << "\" y=\"" << num(Y(r.max.y))
            << "\" width=\"" << num((r.max.x - r.min.x) * scale) << "\" height=\""
            << num((r.max.y - r.min.y) * scale)
            << "\" fill=\"#e8f0fe\" stroke=\"#7aa2e8\" stroke-dasharray=\"4 3\"/>\n";

    for (const RectObstacle& r : maze.obstacles)
        out << "<rect x=\"" << num(X(r.min.x)) << "\" y=\"" << num(Y(r.max.y))
            << "\" width=\"" << num((r.max.x - r.min.x) * scale) << "\" height=\""
            << num((r.max.y - r.min.y) * scale) << "\" fill=\"#44474d\"/>\n";

    for (const GoalRegion& g : maze.goals)
        out << "<circle cx=\"" << num(X(g.center.x)) << "\" cy=\"" << num(Y(g.center.y))
            << "\" r=\"" << num(g.radius * scale)
            << "\" fill=\"#d9f2d9\" stroke=\"#2e8b2e\" stroke-width=\"2\"/>\n";

    for (const SvgPath& p : paths) {
        if (p.traj.states.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << p.color << "\" stroke-width=\""
            << num(p.width) << "\" points=\"";
        for (std::size_t i = 0; i < p.traj.states.size(); ++i) {
            const Vec2& q = p.traj.states[i].pos;
            out << (i ? " " : "") << num(X(q.x)) << "," << num(Y(q.y));
        }
        out << "\"/>\n";
        const Vec2& a = p.traj.states.front().pos;
        const Vec2& b = p.traj.states.back().pos;
        out << "<circle cx=\"" << num(X(a.x)) << "\" cy=\"" << num(Y(a.y))
            << "\" r=\"4\" fill=\"" << p.color << "\"/>\n";
        out << "<circle cx=\"" << num(X(b.x)) << "\" cy=\"" << num(Y(b.y))
            << "\" r=\"4\" fill=\"none\" stroke=\"" << p.color
            << "\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";

    std::ofstream f(path);
    if (!f) throw IoError("write_maze_svg: cannot open " + path.string());
    f << out.str();
    if (!f.good()) throw IoError("write_maze_svg: write failed for " + path.string());
}

}  // namespace cdrb
