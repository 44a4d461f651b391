#include "cdrb/trajectory.hpp"

#include <fstream>

#include "cdrb/errors.hpp"
#include "cdrb/textio.hpp"

namespace cdrb {

Trajectory crop_trajectory(const Trajectory& traj, int H, Rng& rng) {
    if (H < 1) throw ConfigError("crop_trajectory: horizon must be positive");
    const int n = static_cast<int>(traj.states.size());
    if (n < H + 1)
        throw ConfigError("crop_trajectory: trajectory too short (" +
                          std::to_string(n) + " states, need " +
                          std::to_string(H + 1) + ")");
    const int start = static_cast<int>(rng.uniform_index(n - H));
    Trajectory out;
    out.states.assign(traj.states.begin() + start,
                      traj.states.begin() + start + H + 1);
    if (traj.has_actions()) {
        out.actions.assign(traj.actions.begin() + start,
                           traj.actions.begin() + start + H);
    }
    return out;
}

double path_length(const Trajectory& traj) {
    double len = 0.0;
    for (std::size_t i = 1; i < traj.states.size(); ++i)
        len += (traj.states[i].pos - traj.states[i - 1].pos).norm();
    return len;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("trajectory: cannot open " + path.string() + " for writing");
    f << "cdrb-trajectory 1\n";
    f << "states " << traj.states.size() << "\n";
    f << "actions " << traj.actions.size() << "\n";
    for (const MazeState& s : traj.states)
        f << fmt_g17(s.pos.x) << " " << fmt_g17(s.pos.y) << " " << fmt_g17(s.vel.x)
          << " " << fmt_g17(s.vel.y) << "\n";
    for (const Action& a : traj.actions)
        f << fmt_g17(a.force.x) << " " << fmt_g17(a.force.y) << "\n";
    if (!f.good()) throw IoError("trajectory: write failed for " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("trajectory: cannot open " + path.string());
    TokenReader r(f, "trajectory " + path.string());
    r.expect("cdrb-trajectory");
    if (r.integer() != 1) throw IoError("trajectory: unsupported version");
    r.expect("states");
    const long long ns = r.integer();
    r.expect("actions");
    const long long na = r.integer();
    if (ns < 1 || na < 0 || (na != 0 && na != ns - 1))
        throw IoError("trajectory: inconsistent counts in " + path.string());
    Trajectory out;
    out.states.resize(static_cast<std::size_t>(ns));
    for (MazeState& s : out.states) {
        s.pos.x = r.real();
        s.pos.y = r.real();
        s.vel.x = r.real();
        s.vel.y = r.real();
    }
    out.actions.resize(static_cast<std::size_t>(na));
    for (Action& a : out.actions) {
        a.force.x = r.real();
        a.force.y = r.real();
    }
    return out;
}

}  // namespace cdrb
